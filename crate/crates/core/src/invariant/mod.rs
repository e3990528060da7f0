//! Invariant sets of a skew product seen through samples: saddle periodic
//! points grouped into components, classification of critical fibers by
//! where their orbits end up, postcritical and fiber-boundary clouds,
//! accumulation-set estimators, and a numeric hyperbolicity report.
//!
//! Everything here is an estimator. Orbits run in f64, so a repelling base
//! point can only be tracked for a logarithmic number of steps before
//! rounding drift takes over; the classifiers and estimators are designed
//! around that budget and say `Unresolved` rather than guess.

mod accumulate;
mod classify;
mod saddle;

pub use accumulate::{
    estimate_accumulation, AccCluster, AccumulationEstimate, AccumulationKind, AccumulationParams,
};
pub use classify::{
    axiom_a_check, classify_critical, j2_sample, postcritical_sample, AxiomAReport,
    CriticalSample, FiberBoundarySample, StableClassification, StableLabel,
};
pub use saddle::{find_saddles, unstable_arc, SaddlePoint, SaddleSetEstimate, UnstableArc};

pub(crate) use classify::repelling_fixed_points;

use crate::dynamics::DynamicsError;
use crate::julia::JuliaError;
use crate::numeric::NumericError;
use num_complex::Complex64;
use thiserror::Error;

/// Default spatial resolution for clustering point clouds in C^2.
pub const DEFAULT_CLUSTER_EPS: f64 = 1e-3;

/// Saddle points within this distance, or on a common cycle, share a
/// component.
pub const COMPONENT_RADIUS: f64 = 10.0 * DEFAULT_CLUSTER_EPS;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("{0}")]
    Invalid(String),
    #[error("period {requested} exceeds cap {cap}: the iterated base degree grows too fast")]
    DegreeOverflow { requested: usize, cap: usize },
    #[error("{} base critical orbit(s) neither escaped nor settled on an attracting cycle", borderline.len())]
    Inconclusive { borderline: Vec<Complex64> },
    #[error("map does not extend regularly to infinity (margin {margin:e})")]
    NotRegular { margin: f64 },
    #[error("unstable direction undefined: |lambda - dq/dw| = {denom:e}")]
    Resonance { denom: f64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Julia(#[from] JuliaError),
}
