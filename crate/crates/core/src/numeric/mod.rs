//! Numeric foundations: polynomials, interval arithmetic, and a
//! double-double kernel for noise-critical orbit evaluations.

mod bipoly;
mod dd;
mod interval;
mod poly;

pub use bipoly::BiPoly;
pub use dd::{dd_poly_eval, Dd};
pub use interval::RealInterval;
pub use poly::{poly_roots, Poly, RootSet, DEFAULT_ROOT_TOL};

use thiserror::Error;

/// Errors produced by the numeric layer.
#[derive(Debug, Clone, Error)]
pub enum NumericError {
    /// Root iteration failed to reach the residual target within its budget.
    #[error("root finding did not converge within {iters} iterations (residual {residual:.3e})")]
    NonConvergence { iters: usize, residual: f64 },
    /// An operation left its domain (division by an interval containing zero,
    /// square root of a negative interval, ...).
    #[error("domain error: {0}")]
    Domain(String),
}
