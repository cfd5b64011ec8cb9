//! Numerical laboratory for radial-process comparison theorems on step-2
//! sub-Riemannian model spaces: comparison drifts, group-level horizontal
//! Brownian motion, SDE and PDE solvers, and the statistics that turn their
//! output into pass/fail verdicts.

pub mod completeness;
pub mod drifts;
pub mod error;
pub mod groups;
pub mod pde1d;
pub mod sde;
pub mod spectral3d;
pub mod stats;

pub use error::{Error, Result};
