//! Conformal geometry on the circle: curvature operators for metrics
//! `g = w^{-4} g_s` and `g = w^{-4/3} g_s`, the Möbius-type transforms that
//! leave the associated sharp functionals invariant, constrained minimization
//! of those functionals, normalized curvature flows, and the executable
//! identity suites that verify conformal covariance and the sharp constants
//! numerically.
//!
//! Everything is built on a pseudospectral representation of smooth
//! 2π-periodic functions ([`spectral::PeriodicFunction`]).

pub mod ensemble;
pub mod error;
pub mod extremals;
pub mod flows;
pub mod functionals;
pub mod geometry;
pub mod optimize;
pub mod spectral;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use spectral::{PeriodicFunction, DEFAULT_GRID, POSITIVITY_FLOOR};
