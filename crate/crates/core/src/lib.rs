//! Asymptotic microlocal analysis of ε-parameterized nets.
//!
//! The crate measures how families `(u_ε)` of smooth functions grow as
//! `ε → 0`: seminorm valuations, the fibers `Σ_x` of the singular spectrum,
//! singular supports, and regularity classes, together with solution nets for
//! a handful of linear and semilinear PDE propagation experiments.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod mollify;
pub mod nets;
pub mod pde_suite;
pub mod quadrature;
pub mod seminorms;

pub use error::{Error, Result};
