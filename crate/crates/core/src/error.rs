use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid dimensions or spacings violate the node-centred layout.
    InvalidGrid(String),
    /// Two fields (or a field and a solver) live on different grids.
    GridMismatch,
    /// A function was evaluated outside its domain.
    Domain(String),
    /// A field fails one or more admissibility constraints.
    Inadmissible(String),
    /// The grid is too coarse for the requested construction.
    Resolution(String),
    /// The ascent phase could not find a non-decreasing step.
    LineSearch { iteration: usize, energy: f64 },
    /// The iterate collapsed to (numerically) zero mass.
    DegenerateMaximizer { mass: f64, threshold: f64 },
    /// Not enough data points, or data unusable for a fit.
    Precondition(String),
    /// Malformed parameter or input.
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::GridMismatch => write!(f, "fields are defined on different grids"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Inadmissible(msg) => write!(f, "field is not admissible: {msg}"),
            Error::Resolution(msg) => write!(f, "under-resolved grid: {msg}"),
            Error::LineSearch { iteration, energy } => write!(
                f,
                "line search failed at ascent step {iteration} (energy {energy:e})"
            ),
            Error::DegenerateMaximizer { mass, threshold } => write!(
                f,
                "maximizer collapsed: mass {mass:e} below {threshold:e}"
            ),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
