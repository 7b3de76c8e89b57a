//! Studies on top of `equil-core`: run manifests, ε-sweeps with diagnostics
//! and norm batteries, scaling fits, the `CHNF` field format, SVG plots and
//! the acceptance checks.
//!
//! Output directory of a sweep:
//!
//! * `results.csv`: one row per `ε`, failed runs included. Columns: `eps`,
//!   `status` (`converged`, `not_converged`, `failed`), grid, trial-ellipse
//!   energies `trial_*`, maximizer energies `energy_*`, `alpha`, `mass`,
//!   `max_amp`, `supp_x`, `supp_y`, `el_res`, `el_viol`, multiplier and
//!   support ratios, transport residual, gradient check, energy-identity
//!   statistics, then one `norm:<kind>:<s>:<p>` column per battery norm
//!   (`holder:<k>:<alpha>` and `dsup:<k>` for Hölder and derivative norms).
//!   Missing values are `NaN`.
//! * `fits.csv`: `quantity, slope, intercept, r2, predicted, tolerance, pass,
//!   n_runs, note`, fitted over converged runs only.
//! * `manifest.json`: the manifest echoed with the git hash.
//! * `fields/omega_eps<ε>.bin`, `fields/psi_eps<ε>.bin`: `CHNF` fields.
//! * `plots/<quantity>.svg`: log-log data with the fitted line.

pub mod acceptance;
pub mod battery;
pub mod error;
pub mod fieldio;
pub mod fits;
pub mod manifest;
pub mod plot;
pub mod sweep;

pub use error::{Result, StudiesError};
pub use manifest::{GridParams, Mode, RunManifest, SolverParams};
pub use sweep::{run_sweep, RunRecord, RunStatus, SweepOutcome};
