//! Numerical construction of smooth, compactly supported relative equilibria
//! of the 2D Euler equations near Couette flow in the channel `ℝ × [-1, 1]`.
//!
//! The crate is `no_std` (with `alloc`): every routine here is a pure
//! computation on in-memory fields. File formats, the command line and the
//! sweep driver live in the `equil` crate.
//!
//! Module map:
//!
//! * [`grid`]: node-centred channel grid, fields, quadrature and gradients.
//! * [`greenkernel`]: closed-form Dirichlet Green function of the channel and
//!   a direct convolution used as an oracle for the fast solver.
//! * [`poisson`]: Fourier-in-x, tridiagonal-in-y solver for `-Δψ = ω`.
//! * [`penalty`]: the vorticity function `f`, its inverse `F'` and `F`.
//! * [`variational`]: penalized energy, Steiner symmetrization and the
//!   maximizer with its Euler–Lagrange diagnostics.
//! * [`norms`]: `L^p`, Gagliardo `W^{s,p}`, Fourier `H^s`, Hölder norms.
//! * [`rigidity`]: critical-layer and energy-identity diagnostics.
//! * [`fit`]: log-log least squares for scaling exponents.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod fft;
mod quad;

pub mod fit;
pub mod greenkernel;
pub mod grid;
pub mod norms;
pub mod penalty;
pub mod poisson;
pub mod rigidity;
pub mod variational;

pub use error::{Error, Result};
pub use fit::{fit_loglog, ScalingFit};
pub use grid::{ChannelGrid, Field};
pub use penalty::PenaltyFamily;
pub use poisson::{PoissonSolution, PoissonSolver};
pub use variational::{AdmissibleSpec, EnergyBreakdown, SolveReport, SolverOptions};
