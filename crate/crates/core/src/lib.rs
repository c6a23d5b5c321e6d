//! Steady-state solver for the one-dimensional Helmholtz equation
//!
//! `u'' + k^2 u = f` on `(0, 1)` with impedance conditions at both ends is
//! recast as the steady state of a linear 4x4 first-order hyperbolic system.
//! The system is written in Riemann invariants and marched in time with an
//! upwind scheme whose neighbour reconstructions integrate the steady ODE
//! exactly (a matrix exponential plus a source integral), so discrete steady
//! states are preserved to round-off and the accuracy does not degrade with
//! the wavenumber the way classical discretizations do.
//!
//! Module map:
//!
//! - [`model`]: problem data and every matrix of the continuous models.
//! - [`linalg`]: 4x4 matrix exponential, cached powers, Gauss-Legendre rules
//!   and the exact steady-ODE propagators.
//! - [`solver`]: mesh, time grid and the explicit time-marching scheme.
//! - [`verification`]: manufactured plane-wave solution, error norms and the
//!   wavenumber / refinement sweeps.
//! - [`cli`]: configuration parsing and output files for the `helmwave` binary.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod model;
pub mod solver;
pub mod verification;

pub use error::{Error, Result};
pub use model::{
    BoundaryData, HelmholtzProblem, Mat4, ModelMatrices, Representation, Source, SpectralParams,
    StateVec, Vec4,
};
