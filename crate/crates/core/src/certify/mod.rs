//! Certified inequality checks behind the perturbed-family construction.
//!
//! Each check evaluates one concrete inequality chain with outward-rounded
//! interval arithmetic, corroborates it on a sampled grid where a region is
//! involved, and returns a [`LemmaReport`] carrying the margin by which the
//! inequality holds. The angle check runs in exact rational arithmetic and
//! owes nothing to floating point. [`full_certificate`] strings the checks
//! together with the dynamical estimators into one machine-readable verdict
//! for a single instance.
//!
//! A report passes iff its margin is positive; a check that cannot run
//! because an input breaks its stated precondition refuses with an error
//! instead of guessing.

mod checks;
mod pipeline;

pub use checks::{
    check_angle_combinatorics, check_contract, check_critical_disjoint, check_escape_constant,
    check_escape_empirical, check_fiber_escape, check_k_box, check_reach_left, AngleIntervalSet,
    DEFAULT_DELTA_PRIME, DEFAULT_R, FIBER_TRAP_IMAGE, FIBER_TRAP_RADIUS, MAX_ANGLE_DEPTH,
};
pub use pipeline::{full_certificate, CertConfig, CertificateOutcome};

use crate::biquad::BiquadError;
use crate::dynamics::DynamicsError;
use crate::invariant::InvariantError;
use crate::julia::JuliaError;
use crate::numeric::NumericError;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("orbit of {z} never reached the left half plane within {n_max} steps")]
    Unreached { z: Complex64, n_max: usize },
    #[error("counterexample at z = {z}, w = {w}")]
    CounterexampleFound { z: Complex64, w: Complex64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Julia(#[from] JuliaError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Biquad(#[from] BiquadError),
}

/// A region in the base plane over which a fiber inequality is asserted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Disk { center: Complex64, radius: f64 },
    Box { x: [f64; 2], y: [f64; 2] },
    /// `{u + iv : |u| <= halfwidth, |v| <= height}`.
    Strip { halfwidth: f64, height: f64 },
}

impl Region {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self, CertifyError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(CertifyError::PreconditionViolation(format!(
                "disk radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Region::Disk { center, radius })
    }

    pub fn rect(x: [f64; 2], y: [f64; 2]) -> Result<Self, CertifyError> {
        if !(x[0] < x[1]) || !(y[0] < y[1]) || !x.iter().chain(&y).all(|v| v.is_finite()) {
            return Err(CertifyError::PreconditionViolation(format!(
                "box needs finite increasing ranges, got x = {x:?}, y = {y:?}"
            )));
        }
        Ok(Region::Box { x, y })
    }

    pub fn strip(halfwidth: f64, height: f64) -> Result<Self, CertifyError> {
        if !(halfwidth > 0.0) || !(height > 0.0) || !halfwidth.is_finite() || !height.is_finite() {
            return Err(CertifyError::PreconditionViolation(format!(
                "strip needs positive extents, got halfwidth {halfwidth}, height {height}"
            )));
        }
        Ok(Region::Strip { halfwidth, height })
    }

    /// Supremum of `|p - z|` over the region. Exact for the disk; for the
    /// rectangles it is the maximum over corners, which is the supremum
    /// because the distance to a point is convex.
    pub fn sup_dist_to(&self, p: Complex64) -> f64 {
        match *self {
            Region::Disk { center, radius } => (p - center).norm() + radius,
            Region::Box { x, y } => {
                let mut d = 0.0f64;
                for &cx in &x {
                    for &cy in &y {
                        d = d.max((p - Complex64::new(cx, cy)).norm());
                    }
                }
                d
            }
            Region::Strip { halfwidth, height } => {
                ((p.re.abs() + halfwidth).powi(2) + (p.im.abs() + height).powi(2)).sqrt()
            }
        }
    }
}

/// The numeric constants a check ran with. Fields a given check does not
/// use stay zero; `n_steps` serializes as `"N"`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LemmaParams {
    pub n: usize,
    pub r: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub eps_n: f64,
    #[serde(rename = "N")]
    pub n_steps: usize,
}

/// Outcome of one check: the margin by which its inequality holds and a
/// human-readable trail of the interval bounds and grid extremes behind it.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub lemma_id: String,
    pub params: LemmaParams,
    pub margin: f64,
    pub pass: bool,
    pub evidence: String,
}

impl LemmaReport {
    /// `pass` is derived, never stored independently: a report passes iff
    /// its margin is positive.
    pub fn new(lemma_id: &str, params: LemmaParams, margin: f64, evidence: String) -> Self {
        LemmaReport {
            lemma_id: lemma_id.to_string(),
            params,
            margin,
            pass: margin > 0.0,
            evidence,
        }
    }

    /// A failing report for a check that refused to run.
    pub fn refused(lemma_id: &str, params: LemmaParams, err: &CertifyError) -> Self {
        LemmaReport::new(lemma_id, params, -1.0, format!("refused: {err}"))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lemma_id": self.lemma_id,
            "params": self.params,
            "margin": self.margin,
            "pass": self.pass,
            "evidence": self.evidence,
        })
    }
}
