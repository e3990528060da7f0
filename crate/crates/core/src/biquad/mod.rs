//! The real biquadratic family `p_{a,b}(z) = (z^2 + a)^2 + b`.
//!
//! Parameter space carries three curves bounding the set of parameters with
//! connected Julia set: a multiplier-one arc and two preperiodic curves on
//! which a critical value lands on the repelling fixed point `beta` (the
//! largest real fixed point). This module knows the curves in closed form,
//! classifies parameters against them, searches the first preperiodic curve
//! for parameters whose free critical point is exactly periodic, and builds
//! the perturbed skew products the rest of the crate studies.

mod finder;
mod io;
mod presets;

pub use finder::{construct_example, cycle_residual, example_fiber, superattracting_param, ExampleInstance};
pub use io::{write_curve_csv, write_locus_ppm};
pub use presets::{product_preset, sumi_preset};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::julia::{connectivity_test, Connectivity, JuliaError};
use crate::numeric::{poly_roots, NumericError, Poly, DEFAULT_ROOT_TOL};

/// Margins this close to zero are reported as boundary rather than trusted
/// for a strict side.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Relative slack on curve parameter ranges, so endpoint values computed in
/// slightly different ways still pass.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum BiquadError {
    #[error("{0}")]
    Range(String),
    #[error("no real fixed point at (a, b) = ({a}, {b})")]
    NoRealFixedPoint { a: f64, b: f64 },
    #[error(
        "no sign change of the cycle gap for n = {n} over {samples} curve samples \
         (smallest |gap| {closest_gap:e} at a = {closest_a})"
    )]
    NotBracketed {
        n: usize,
        samples: usize,
        closest_a: f64,
        closest_gap: f64,
    },
    #[error(
        "cycle residual {residual:e} exceeds {tol:e} at n = {n}; one ulp of the \
         curve parameter moves it by about {ulp_sensitivity:e}"
    )]
    ResidualAboveTol {
        n: usize,
        residual: f64,
        tol: f64,
        ulp_sensitivity: f64,
    },
    #[error("perturbation {eta:e} destroyed the attracting cycle at every shrink step")]
    PerturbationTooLarge { eta: f64 },
    #[error("critical point 0 stayed bounded for {maxiter} steps at perturbation {eta:e}")]
    PerturbationTooSmall { eta: f64, maxiter: usize },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Julia(#[from] JuliaError),
}

/// A parameter pair of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiquadParams {
    pub a: f64,
    pub b: f64,
}

impl BiquadParams {
    pub fn new(a: f64, b: f64) -> Result<Self, BiquadError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(BiquadError::Range(format!(
                "parameters must be finite, got ({a}, {b})"
            )));
        }
        Ok(BiquadParams { a, b })
    }

    /// Expanded form `z^4 + 2a z^2 + (a^2 + b)`.
    pub fn poly(&self) -> Poly {
        Poly::from_real(&[self.a * self.a + self.b, 0.0, 2.0 * self.a, 0.0, 1.0])
    }

    /// `p(x)` for real `x`, kept in real arithmetic.
    pub fn eval_real(&self, x: f64) -> f64 {
        let u = x * x + self.a;
        u * u + self.b
    }

    /// `p'(x) = 4x (x^2 + a)` for real `x`.
    pub fn derivative_real(&self, x: f64) -> f64 {
        4.0 * x * (x * x + self.a)
    }

    /// 0 and the two square roots of `-a`; the latter are real exactly when
    /// `a <= 0`.
    pub fn critical_points(&self) -> [Complex64; 3] {
        let s = Complex64::new(-self.a, 0.0).sqrt();
        [Complex64::new(0.0, 0.0), -s, s]
    }

    /// The partner parameter under the coordinate change `z -> z^2 + a`,
    /// which intertwines `p_{a,b}` with `p_{b,a}`.
    pub fn swapped(&self) -> BiquadParams {
        BiquadParams {
            a: self.b,
            b: self.a,
        }
    }

    pub fn dist(&self, other: &BiquadParams) -> f64 {
        (self.a - other.a).hypot(self.b - other.b)
    }

    /// Radius beyond which real and complex orbits provably grow.
    pub fn escape_radius(&self) -> f64 {
        (1.0 + 2.0 * self.a.abs() + (self.a * self.a + self.b).abs()).max(2.0)
    }
}

/// The largest real fixed point and its multiplier.
#[derive(Debug, Clone, Copy)]
pub struct BetaResult {
    pub beta: f64,
    pub multiplier: f64,
    pub is_repelling: bool,
}

/// Where a parameter sits relative to the connectedness locus.
#[derive(Debug, Clone, PartialEq)]
pub enum LocusClass {
    Connected,
    Escaping(Vec<Complex64>),
    BoundaryWithinTol,
    Inconclusive,
}

/// The multiplier-one arc `(a, b) = (1/(2t) - t^2/4, t/2 - 1/(4t^2))` for
/// `t` in `[4^{-1/3}, 4^{1/3}]`; the fixed point is `t/2` with derivative
/// exactly one.
pub fn per1_curve(t: f64) -> Result<BiquadParams, BiquadError> {
    let hi = 4.0f64.cbrt();
    let lo = 0.25f64.cbrt();
    if !t.is_finite() || t < lo * (1.0 - RANGE_SLACK) || t > hi * (1.0 + RANGE_SLACK) {
        return Err(BiquadError::Range(format!(
            "curve parameter t = {t} outside [{lo}, {hi}]"
        )));
    }
    BiquadParams::new(0.5 / t - 0.25 * t * t, 0.5 * t - 0.25 / (t * t))
}

/// The curve on which the critical value of 0 is the fixed point `beta`:
/// `b = -a^2 + sqrt(-2a)` for `a` in `[-2, -2^{1/3}/4]`.
pub fn preper11_b(a: f64) -> Result<f64, BiquadError> {
    let hi = -(2.0f64.cbrt()) / 4.0;
    if !a.is_finite() || a < -2.0 * (1.0 + RANGE_SLACK) || a > hi * (1.0 - RANGE_SLACK) {
        return Err(BiquadError::Range(format!(
            "curve parameter a = {a} outside [-2, {hi}]"
        )));
    }
    Ok(-a * a + (-2.0 * a).sqrt())
}

/// The mirror curve under the parameter swap: `a = -b^2 + sqrt(-2b)` for
/// `b` in `[-2, -2^{1/3}/4]`. On it the critical value `b` maps onto the
/// fixed point `beta = -b` in one step.
pub fn preper21_a(b: f64) -> Result<f64, BiquadError> {
    let hi = -(2.0f64.cbrt()) / 4.0;
    if !b.is_finite() || b < -2.0 * (1.0 + RANGE_SLACK) || b > hi * (1.0 - RANGE_SLACK) {
        return Err(BiquadError::Range(format!(
            "curve parameter b = {b} outside [-2, {hi}]"
        )));
    }
    Ok(-b * b + (-2.0 * b).sqrt())
}

/// Largest real fixed point of `p_{a,b}` with its multiplier.
pub fn beta_fixed(params: &BiquadParams) -> Result<BetaResult, BiquadError> {
    let (a, b) = (params.a, params.b);
    let fixed = Poly::from_real(&[a * a + b, -1.0, 2.0 * a, 0.0, 1.0]);
    let roots = poly_roots(&fixed, DEFAULT_ROOT_TOL)?;
    let beta = roots
        .real_roots(1e-6)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if !beta.is_finite() {
        return Err(BiquadError::NoRealFixedPoint { a, b });
    }
    let multiplier = 4.0 * beta * (beta * beta + a);
    Ok(BetaResult {
        beta,
        multiplier,
        is_repelling: multiplier.abs() > 1.0,
    })
}

/// Classifies a parameter against the connectedness locus.
///
/// For `a < 0` with a real fixed point the real graph decides: the map is in
/// the locus exactly when the critical value `b` is at least `-beta` and the
/// critical value `p(0)` is at most `beta`. Margins within [`BOUNDARY_TOL`]
/// of zero (or a multiplier within it of one) are reported as boundary
/// rather than resolved to a side. Everything else falls back to escape-time
/// iteration of the critical orbits.
pub fn classify_params(params: &BiquadParams, maxiter: u32) -> LocusClass {
    let (a, b) = (params.a, params.b);
    if a < 0.0 {
        match beta_fixed(params) {
            Ok(fixed) => {
                if !fixed.is_repelling && (fixed.multiplier - 1.0).abs() <= BOUNDARY_TOL {
                    return LocusClass::BoundaryWithinTol;
                }
                let lower = b + fixed.beta;
                let upper = fixed.beta - (a * a + b);
                if lower.abs() <= BOUNDARY_TOL || upper.abs() <= BOUNDARY_TOL {
                    return LocusClass::BoundaryWithinTol;
                }
                if lower > 0.0 && upper > 0.0 {
                    return LocusClass::Connected;
                }
                let mut escaping = Vec::new();
                if upper < 0.0 {
                    escaping.push(Complex64::new(0.0, 0.0));
                }
                if lower < 0.0 {
                    let c = (-a).sqrt();
                    escaping.push(Complex64::new(-c, 0.0));
                    escaping.push(Complex64::new(c, 0.0));
                }
                return LocusClass::Escaping(escaping);
            }
            Err(BiquadError::NoRealFixedPoint { .. }) => {
                // The whole real graph sits above the diagonal, so every
                // real orbit runs away; all three critical values are real.
                return LocusClass::Escaping(params.critical_points().to_vec());
            }
            Err(_) => return LocusClass::Inconclusive,
        }
    }
    match connectivity_test(&params.poly(), maxiter, params.escape_radius()) {
        Ok(Connectivity::Connected) => LocusClass::Connected,
        Ok(Connectivity::Disconnected { escaping }) => LocusClass::Escaping(escaping),
        Err(_) => LocusClass::Inconclusive,
    }
}

/// A rectangle of classified parameters, row-major with `b` increasing by
/// row, `a` by column, endpoints included.
#[derive(Debug, Clone)]
pub struct LocusGrid {
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub na: usize,
    pub nb: usize,
    pub classes: Vec<LocusClass>,
}

impl LocusGrid {
    pub fn class(&self, ia: usize, ib: usize) -> &LocusClass {
        &self.classes[ib * self.na + ia]
    }

    pub fn param(&self, ia: usize, ib: usize) -> BiquadParams {
        BiquadParams {
            a: self.a_min + (self.a_max - self.a_min) * ia as f64 / (self.na - 1) as f64,
            b: self.b_min + (self.b_max - self.b_min) * ib as f64 / (self.nb - 1) as f64,
        }
    }
}

/// Classifies a parameter rectangle in parallel; cell order and content are
/// deterministic.
pub fn classify_grid(
    a_min: f64,
    a_max: f64,
    b_min: f64,
    b_max: f64,
    na: usize,
    nb: usize,
    maxiter: u32,
) -> Result<LocusGrid, BiquadError> {
    if !(a_min < a_max) || !(b_min < b_max) || !a_min.is_finite() || !b_min.is_finite() {
        return Err(BiquadError::Range(format!(
            "bad parameter rectangle [{a_min}, {a_max}] x [{b_min}, {b_max}]"
        )));
    }
    if na < 2 || nb < 2 {
        return Err(BiquadError::Range(format!(
            "grid needs at least 2 samples per side, got {na} x {nb}"
        )));
    }
    let classes = (0..na * nb)
        .into_par_iter()
        .map(|idx| {
            let (ia, ib) = (idx % na, idx / na);
            let params = BiquadParams {
                a: a_min + (a_max - a_min) * ia as f64 / (na - 1) as f64,
                b: b_min + (b_max - b_min) * ib as f64 / (nb - 1) as f64,
            };
            classify_params(&params, maxiter)
        })
        .collect();
    Ok(LocusGrid {
        a_min,
        a_max,
        b_min,
        b_max,
        na,
        nb,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn multiplier_one_curve_at_unit_parameter() {
        let p = per1_curve(1.0).unwrap();
        assert!((p.a - 0.25).abs() < 1e-15 && (p.b - 0.25).abs() < 1e-15);
        // fixed point t/2 with derivative exactly one
        assert!((p.eval_real(0.5) - 0.5).abs() < 1e-12);
        assert!((p.derivative_real(0.5) - 1.0).abs() < 1e-8);
        assert!(per1_curve(0.1).is_err() && per1_curve(2.0).is_err());
    }

    #[test]
    fn curve_endpoints_meet_the_preperiodic_curves() {
        let hi = per1_curve(4.0f64.cbrt()).unwrap();
        assert!((hi.a - -(2.0f64.cbrt()) / 4.0).abs() < 1e-12);
        assert!((hi.b - preper11_b(hi.a).unwrap()).abs() < 1e-9);
        let lo = per1_curve(0.25f64.cbrt()).unwrap();
        assert!((lo.a - preper21_a(lo.b).unwrap()).abs() < 1e-9);
        // the two endpoints are parameter swaps of each other
        assert!(hi.dist(&lo.swapped()) < 1e-9);
    }

    #[test]
    fn preperiodic_curve_values() {
        assert!((preper11_b(-2.0).unwrap() - -2.0).abs() < 1e-12);
        assert!((preper11_b(-0.5).unwrap() - 0.75).abs() < 1e-12);
        assert!((preper21_a(-2.0).unwrap() - -2.0).abs() < 1e-12);
        assert!((preper21_a(-0.5).unwrap() - 0.75).abs() < 1e-12);
        assert!(preper11_b(-2.5).is_err() && preper11_b(-0.1).is_err());
        assert!(preper21_a(0.5).is_err());
    }

    #[test]
    fn second_curve_sends_b_onto_the_fixed_point() {
        let b = -0.5;
        let params = BiquadParams::new(preper21_a(b).unwrap(), b).unwrap();
        let beta = beta_fixed(&params).unwrap().beta;
        assert!((beta + b).abs() < 1e-9);
        assert!((params.eval_real(b) - beta).abs() < 1e-9);
    }

    #[test]
    fn rejected_branch_keeps_negative_slack() {
        // On the discarded branch of the second curve, the cubic cofactor of
        // the fixed-point polynomial at -b stays negative, so the largest
        // fixed point is above -b and the branch never satisfies beta = -b.
        let hi = -(2.0f64.cbrt()) / 4.0;
        for i in 1..1000 {
            let b = -2.0 + (hi + 2.0) * i as f64 / 1000.0;
            let g = 4.0 * b * (-2.0 * b).sqrt() - 1.0;
            assert!(g < 0.0, "slack failed at b = {b}");
        }
    }

    #[test]
    fn largest_fixed_point_of_known_parameters() {
        let cheb = beta_fixed(&BiquadParams::new(-2.0, -2.0).unwrap()).unwrap();
        assert!((cheb.beta - 2.0).abs() < 1e-10);
        assert!((cheb.multiplier - 16.0).abs() < 1e-8 && cheb.is_repelling);

        let tangent = beta_fixed(&BiquadParams::new(0.25, 0.25).unwrap()).unwrap();
        assert!((tangent.beta - 0.5).abs() < 1e-6);
        assert!((tangent.multiplier - 1.0).abs() < 1e-6 && !tangent.is_repelling);

        match beta_fixed(&BiquadParams::new(0.0, 10.0).unwrap()) {
            Err(BiquadError::NoRealFixedPoint { .. }) => {}
            other => panic!("expected no real fixed point, got {other:?}"),
        }
    }

    #[test]
    fn classification_of_known_parameters() {
        // strictly inside: all margins positive
        let inside = BiquadParams::new(-1.0, -0.5).unwrap();
        assert_eq!(classify_params(&inside, 512), LocusClass::Connected);

        // escape of the middle critical point
        match classify_params(&BiquadParams::new(0.0, 1.0).unwrap(), 512) {
            LocusClass::Escaping(pts) => {
                assert_eq!(pts, vec![Complex64::new(0.0, 0.0)]);
            }
            other => panic!("expected escape of 0, got {other:?}"),
        }

        // exactly on the first preperiodic curve
        let preper = BiquadParams::new(-0.5, preper11_b(-0.5).unwrap()).unwrap();
        assert_eq!(classify_params(&preper, 512), LocusClass::BoundaryWithinTol);

        // the corner parameter sits on every boundary curve at once
        let corner = BiquadParams::new(-2.0, -2.0).unwrap();
        assert_eq!(classify_params(&corner, 512), LocusClass::BoundaryWithinTol);

        // bounded superattracting pair through the generic path
        assert_eq!(
            classify_params(&BiquadParams::new(0.0, -1.0).unwrap(), 512),
            LocusClass::Connected
        );

        // far below the locus both outer critical points escape
        match classify_params(&BiquadParams::new(-1.0, -3.0).unwrap(), 512) {
            LocusClass::Escaping(pts) => assert_eq!(pts.len(), 2),
            other => panic!("expected two escapers, got {other:?}"),
        }
    }

    #[test]
    fn coordinate_change_swaps_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a: f64 = rng.random_range(-2.5..1.5);
            let b: f64 = rng.random_range(-2.5..1.5);
            let p_ab = BiquadParams::new(a, b).unwrap().poly();
            let p_ba = BiquadParams::new(b, a).unwrap().poly();
            let s_a = Poly::from_real(&[a, 0.0, 1.0]);
            let lhs = s_a.compose(&p_ab);
            let rhs = p_ba.compose(&s_a);
            let scale = 1.0 + lhs.coeff_scale();
            for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                assert!((x - y).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn connected_cells_have_bounded_critical_orbits() {
        let grid = classify_grid(-3.0, 1.0, -3.0, 1.0, 64, 64, 256).unwrap();
        let mut connected = 0;
        for ib in 0..64 {
            for ia in 0..64 {
                if *grid.class(ia, ib) != LocusClass::Connected {
                    continue;
                }
                connected += 1;
                let params = grid.param(ia, ib);
                let p = params.poly();
                let radius = params.escape_radius();
                for c in params.critical_points() {
                    let mut v = c;
                    for _ in 0..256 {
                        v = p.eval(v);
                        assert!(
                            v.norm() <= radius,
                            "critical orbit escaped at (a, b) = ({}, {})",
                            params.a,
                            params.b
                        );
                    }
                }
            }
        }
        assert!(connected > 100, "suspiciously few connected cells");
    }
}
