//! Spectral Galerkin toolkit for the time-periodic forced viscous Burgers
//! equation on the time torus crossed with the unit interval.
//!
//! The crate provides:
//!
//! * spectral fields with fractional time derivatives, the Hilbert transform
//!   and dealiased products ([`field`], [`ops`]);
//! * fractional/anisotropic Sobolev norms, the dual forcing norm and
//!   interpolation-inequality probes ([`sobolev`]);
//! * the weak Burgers operator `L + lambda S`, Newton-Krylov solves with
//!   homotopy continuation in `lambda`, per-solve energy-estimate reports, and
//!   an independent exponential time-stepping oracle ([`burgers`], [`solver`]);
//! * Cole-Hopf transform utilities and the ground-state (period-map)
//!   eigenvalue certificate ([`cole_hopf`]);
//! * a batch front end with JSON configs and machine-readable reports
//!   ([`cli`]).
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod burgers;
pub mod cli;
pub mod cole_hopf;
pub mod error;
pub mod field;
pub mod forcing;
pub mod grid;
pub mod ops;
pub mod sobolev;
pub mod solver;
mod stepping;
mod transforms;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
pub use field::{l2_inner, DualField, Field};
pub use grid::{GridSpec, SpaceBasis};
