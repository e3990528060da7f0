//! Search for parameters with a periodic critical point, and the perturbed
//! skew-product instances built from them.
//!
//! On the first preperiodic curve the free critical point `c = sqrt(-a)`
//! maps to `b` and then onto an increasing chain of preimages of `c` below
//! the fixed point `beta`. Asking `p(b)` to hit the chain member of depth
//! `n - 1` makes `c` periodic with a cycle through the critical point, so
//! the cycle is superattracting. The root of that gap equation is found by
//! scan plus bisection; the forward cycle residual amplifies parameter error
//! by the accumulated multiplier (about `16^{n-1}`), so the gap and the
//! residual are evaluated in double-double precision and the search accepts
//! only if the amplified residual actually meets the caller's tolerance.

use num_complex::Complex64;

use super::{beta_fixed, BiquadError, BiquadParams};
use crate::dynamics::SkewProduct;
use crate::julia::{filled_julia_base, GridSpec};
use crate::numeric::{poly_roots, BiPoly, Dd, Poly, DEFAULT_ROOT_TOL};

/// Samples of the coarse scan along the curve.
const SCAN_SAMPLES: usize = 1024;

/// Largest cycle depth the search accepts; beyond it one ulp of the curve
/// parameter already moves the cycle residual by more than any useful
/// tolerance.
const DEPTH_CAP: usize = 8;

/// Tolerance passed to the parameter search by the instance builder.
const SUPER_TOL: f64 = 1e-9;

/// Iteration budget for the escape of the critical point 0.
const ESCAPE_MAXITER: usize = 4096;

/// Halvings of the perturbation before giving up.
const ETA_SHRINK_STEPS: usize = 64;

/// Lattice points probed on each side of the bisection root, in each
/// parameter direction.
const LATTICE_WINDOW: i64 = 32;

/// Forward steps before the cycle of the free critical point is read off.
const CYCLE_SETTLE: usize = 4096;

/// Distance at which a revisit counts as closing the cycle.
const CYCLE_TOL: f64 = 1e-8;

/// The attracting cycle must keep its multiplier under this margin.
const MULT_MARGIN: f64 = 0.9;

/// Base-plane box measurement grid.
const BOX_NX: u32 = 521;
const BOX_NY: u32 = 241;
const BOX_MAXITER: u32 = 512;

/// Pixels surviving at least this many steps count toward the box hull, so
/// slow escapers near the bounded set fatten the estimate outward. Bounded
/// pixels carry the max sentinel and pass automatically.
const LATE_ESCAPE: u32 = 24;

/// The gap `p(b) - x_{n-1}` along the curve, with `x_j` the increasing chain
/// of real preimages of `c` obtained from the largest-preimage branch.
/// `None` when the chain leaves the reals before reaching depth `n - 1`.
fn ladder_gap(a: f64, n: usize) -> Option<f64> {
    let b = -a * a + (-2.0 * a).sqrt();
    let c = (-a).sqrt();
    let mut x = c;
    for _ in 1..n {
        let s = x - b;
        if s < 0.0 {
            return None;
        }
        let t = -a + s.sqrt();
        if t < 0.0 {
            return None;
        }
        x = t.sqrt();
    }
    let u = b * b + a;
    Some(u * u + b - x)
}

/// Same gap in double-double precision, with `b` rounded to f64 first so the
/// root matches the parameter pair the search actually returns.
fn ladder_gap_dd(a: f64, n: usize) -> Option<Dd> {
    let b = Dd::from(-a * a + (-2.0 * a).sqrt());
    let aa = Dd::from(a);
    let na = aa.mul_f64(-1.0);
    let c = na.sqrt();
    let mut x = c;
    for _ in 1..n {
        let s = x.sub(b);
        if s.hi < 0.0 {
            return None;
        }
        let t = s.sqrt().add(na);
        if t.hi < 0.0 {
            return None;
        }
        x = t.sqrt();
    }
    let u = b.sqr().add(aa);
    Some(u.sqr().add(b).sub(x))
}

/// `|p^{n+1}(c) - c|` for the given parameter pair, evaluated in
/// double-double precision so the answer reflects the parameters rather
/// than evaluation rounding.
pub fn cycle_residual(params: &BiquadParams, n: usize) -> f64 {
    let aa = Dd::from(params.a);
    let b = Dd::from(params.b);
    let c = aa.mul_f64(-1.0).sqrt();
    let mut x = c;
    for _ in 0..=n {
        let u = x.sqr().add(aa);
        x = u.sqr().add(b);
    }
    x.sub(c).value().abs()
}

/// Finds the parameter on the first preperiodic curve whose free critical
/// point is periodic with cycle depth `n` (cycle length `n + 1` through the
/// critical point), to forward residual below `tol`.
pub fn superattracting_param(n: usize, tol: f64) -> Result<BiquadParams, BiquadError> {
    if n == 0 || n > DEPTH_CAP {
        return Err(BiquadError::Range(format!(
            "cycle depth n = {n} outside 1..={DEPTH_CAP}"
        )));
    }
    if !(tol > 0.0) {
        return Err(BiquadError::Range(format!("tolerance must be positive, got {tol}")));
    }
    let a_lo = -2.0;
    let a_hi = -(2.0f64.cbrt()) / 4.0;

    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    let mut closest = (f64::INFINITY, f64::NAN);
    for i in 0..=SCAN_SAMPLES {
        let a = a_lo + (a_hi - a_lo) * i as f64 / SCAN_SAMPLES as f64;
        match ladder_gap(a, n) {
            Some(g) => {
                if g.abs() < closest.0 {
                    closest = (g.abs(), a);
                }
                if let Some((pa, pg)) = prev {
                    if (pg < 0.0) != (g < 0.0) {
                        bracket = Some((pa, a, pg));
                        break;
                    }
                }
                prev = Some((a, g));
            }
            // the preimage chain left the reals; never bridge across the gap
            None => prev = None,
        }
    }
    let Some((mut lo, mut hi, g_lo)) = bracket else {
        return Err(BiquadError::NotBracketed {
            n,
            samples: SCAN_SAMPLES + 1,
            closest_a: closest.1,
            closest_gap: closest.0,
        });
    };

    // Bisect on the double-double gap; its sign stays trustworthy far below
    // the f64 noise floor, so this lands within an ulp of the true root.
    let lo_negative = g_lo < 0.0;
    for _ in 0..128 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let g = ladder_gap_dd(mid, n).map_or(f64::INFINITY, |g| g.value());
        if (g < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pick = |a: f64| {
        let gap = ladder_gap_dd(a, n).map_or(f64::INFINITY, |g| g.value().abs());
        (gap, a)
    };
    let (_, seed) = std::cmp::min_by(pick(lo), pick(hi), |x, y| x.0.total_cmp(&y.0));

    // The bisection lands within a few ulps of the root, but the residual of
    // a representable pair moves in granules of `dR/da * ulp(a)` and
    // `dR/db * ulp(b)`, both around `16^n` ulps. The curve only pins b to
    // about 1e-12, much looser than one ulp, so both lattice directions are
    // free; the two granules are incommensurate and a small window already
    // fills in residual values far below either granule alone.
    let mut best = {
        let b = -seed * seed + (-2.0 * seed).sqrt();
        (cycle_residual(&BiquadParams { a: seed, b }, n), seed, b)
    };
    let w = LATTICE_WINDOW;
    for ka in -w..=w {
        let a = step_ulps(seed, ka);
        let b0 = -a * a + (-2.0 * a).sqrt();
        for kb in -w..=w {
            let b = step_ulps(b0, kb);
            let r = cycle_residual(&BiquadParams { a, b }, n);
            if r < best.0 {
                best = (r, a, b);
            }
        }
    }
    let (residual, a, b) = best;
    let params = BiquadParams::new(a, b)?;

    if residual > tol {
        let step = BiquadParams::new(step_ulps(a, 1), b)?;
        return Err(BiquadError::ResidualAboveTol {
            n,
            residual,
            tol,
            ulp_sensitivity: (cycle_residual(&step, n) - residual).abs(),
        });
    }
    Ok(params)
}

/// Steps a negative float k places along the representable lattice.
fn step_ulps(x: f64, k: i64) -> f64 {
    debug_assert!(x < 0.0 && x.is_finite());
    f64::from_bits((x.to_bits() as i64 + k) as u64)
}

/// A perturbed instance: the base has one escaping critical point while the
/// other two fall to an attracting real cycle, the fiber is
/// `w^4 + 4(2 - z)`, and the fixed point `(beta_n, alpha_n)` is a saddle.
#[derive(Debug, Clone)]
pub struct ExampleInstance {
    pub n: usize,
    pub params: BiquadParams,
    /// Perturbation actually applied to `b`, after shrinking.
    pub eta: f64,
    pub f: SkewProduct,
    pub beta_n: f64,
    pub alpha_n: Complex64,
    /// Half-height of the measured bounding box of the base bounded set.
    pub epsilon_n: f64,
    /// Full measured box `[re_min, re_max, im_min, im_max]`.
    pub box_hull: [f64; 4],
    /// The attracting real cycle of the free critical points.
    pub cycle: Vec<f64>,
    pub cycle_multiplier: f64,
    /// Steps until the critical point 0 left the escape radius.
    pub zero_escape: usize,
}

/// The fiber `w^4 + 4(2 - z)` shared by every instance.
pub fn example_fiber() -> BiPoly {
    let re = |x: f64| Complex64::new(x, 0.0);
    BiPoly::new(vec![
        vec![re(8.0), re(0.0), re(0.0), re(0.0), re(1.0)],
        vec![re(-4.0)],
    ])
}

fn attracting_cycle(params: &BiquadParams, n: usize) -> Option<(Vec<f64>, f64)> {
    let radius = params.escape_radius();
    let mut x = (-params.a).sqrt();
    for _ in 0..CYCLE_SETTLE {
        x = params.eval_real(x);
        if !x.is_finite() || x.abs() > radius {
            return None;
        }
    }
    let anchor = x;
    let mut orbit = vec![x];
    for _ in 0..n + 2 {
        x = params.eval_real(x);
        orbit.push(x);
    }
    let period = (1..=n + 2).find(|&p| (orbit[p] - anchor).abs() < CYCLE_TOL)?;
    if period != n + 1 {
        return None;
    }
    let cycle = orbit[..period].to_vec();
    let mult: f64 = cycle.iter().map(|&x| params.derivative_real(x)).product();
    if mult.abs() > MULT_MARGIN {
        return None;
    }
    Some((cycle, mult))
}

fn zero_escape_time(params: &BiquadParams, maxiter: usize) -> Option<usize> {
    let radius = params.escape_radius();
    let mut x = 0.0f64;
    for k in 0..maxiter {
        if x.abs() > radius {
            return Some(k);
        }
        x = params.eval_real(x);
        if !x.is_finite() {
            return Some(k + 1);
        }
    }
    None
}

fn attracting_fiber_point(beta: f64) -> Result<Complex64, BiquadError> {
    let fixed = Poly::from_real(&[4.0 * (2.0 - beta), -1.0, 0.0, 0.0, 1.0]);
    let alpha = poly_roots(&fixed, DEFAULT_ROOT_TOL)?
        .flattened()
        .into_iter()
        .min_by(|x, y| x.norm().total_cmp(&y.norm()))
        .expect("quartic has roots");
    if 4.0 * alpha.norm().powi(3) >= 1.0 {
        return Err(BiquadError::Range(format!(
            "no attracting fiber fixed point over beta = {beta}"
        )));
    }
    Ok(alpha)
}

/// Escape-time box around everything that survives a while; the hull is
/// dilated half a pixel, so the height is an outer estimate at grid
/// resolution. Doubles the window height if the hull touches the rim.
fn measure_box(params: &BiquadParams) -> Result<(f64, [f64; 4]), BiquadError> {
    let p = params.poly();
    let radius = params.escape_radius();
    let mut half_h = 0.6;
    for _ in 0..3 {
        let spec = GridSpec::new(Complex64::new(0.0, 0.0), 2.6, half_h, BOX_NX, BOX_NY)?;
        let grid = filled_julia_base(&p, &spec, BOX_MAXITER, radius);
        let Some(hull) = grid.hull_of(|c| c >= LATE_ESCAPE) else {
            return Err(BiquadError::Range(
                "no pixel survived the box measurement".into(),
            ));
        };
        let dy = spec.dy();
        if hull[3] < half_h - dy && hull[2] > -(half_h - dy) {
            return Ok((hull[2].abs().max(hull[3].abs()), hull));
        }
        half_h *= 2.0;
    }
    Err(BiquadError::Range(
        "bounded set kept touching the measurement window".into(),
    ))
}

/// Builds the perturbed instance of cycle depth `n`: finds the curve
/// parameter, pushes `b` up by `eta` (halving until the attracting cycle
/// survives), and validates the escape of 0, the saddle fixed point over
/// `beta_n`, and the bounding box of the base bounded set.
pub fn construct_example(n: usize, eta: f64) -> Result<ExampleInstance, BiquadError> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(BiquadError::Range(format!(
            "perturbation must be positive and finite, got {eta}"
        )));
    }
    let on_curve = superattracting_param(n, SUPER_TOL)?;
    let mut cur = eta;
    for _ in 0..ETA_SHRINK_STEPS {
        let b = on_curve.b + cur;
        if b == on_curve.b {
            break;
        }
        let params = BiquadParams { a: on_curve.a, b };
        if let Some((cycle, cycle_multiplier)) = attracting_cycle(&params, n) {
            let Some(zero_escape) = zero_escape_time(&params, ESCAPE_MAXITER) else {
                return Err(BiquadError::PerturbationTooSmall {
                    eta: cur,
                    maxiter: ESCAPE_MAXITER,
                });
            };
            let beta = beta_fixed(&params)?;
            let alpha_n = attracting_fiber_point(beta.beta)?;
            let (epsilon_n, box_hull) = measure_box(&params)?;
            let f = SkewProduct::new(params.poly(), example_fiber())?;
            return Ok(ExampleInstance {
                n,
                params,
                eta: cur,
                f,
                beta_n: beta.beta,
                alpha_n,
                epsilon_n,
                box_hull,
                cycle,
                cycle_multiplier,
                zero_escape,
            });
        }
        cur *= 0.5;
    }
    Err(BiquadError::PerturbationTooLarge { eta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biquad::preper11_b;
    use crate::dynamics::{iterate, Point2};

    #[test]
    fn parameters_descend_the_curve() {
        let corner = BiquadParams { a: -2.0, b: -2.0 };
        let mut last = f64::INFINITY;
        for n in 2..=6 {
            let params = superattracting_param(n, 1e-9).unwrap();
            assert!(cycle_residual(&params, n) < 1e-9, "residual at n = {n}");
            assert!((params.b - preper11_b(params.a).unwrap()).abs() < 1e-12);
            let d = params.dist(&corner);
            assert!(d < last, "distance not decreasing at n = {n}");
            last = d;
        }
    }

    #[test]
    fn cycle_passes_through_the_critical_point() {
        let params = superattracting_param(3, 1e-9).unwrap();
        let c = (-params.a).sqrt();
        let mut x = c;
        let mut mult = 1.0f64;
        for _ in 0..4 {
            mult *= params.derivative_real(x);
            x = params.eval_real(x);
        }
        assert!((x - c).abs() < 1e-6);
        assert!(mult.abs() < 1e-6, "cycle is not superattracting: {mult:e}");
    }

    #[test]
    fn depth_one_closes_a_two_cycle() {
        let params = superattracting_param(1, 1e-9).unwrap();
        let c = (-params.a).sqrt();
        // the critical value of c is b for every parameter, so depth one
        // only needs p(b) = c and the cycle is {c, b}
        assert!((params.eval_real(c) - params.b).abs() < 1e-12);
        assert!((params.eval_real(params.b) - c).abs() < 1e-7);
        assert!(cycle_residual(&params, 1) < 1e-9);
        assert!(superattracting_param(0, 1e-9).is_err());
        assert!(superattracting_param(9, 1e-9).is_err());
    }

    #[test]
    fn instance_of_depth_two_validates() {
        let inst = construct_example(2, 1e-3).unwrap();
        assert_eq!(inst.n, 2);
        assert!(inst.eta > 0.0 && inst.eta <= 1e-3);
        assert_eq!(inst.cycle.len(), 3);
        assert!(inst.cycle_multiplier.abs() < MULT_MARGIN);
        assert!(inst.zero_escape < ESCAPE_MAXITER);

        // (beta, alpha) is fixed and a saddle
        let fixed = Point2::new(Complex64::new(inst.beta_n, 0.0), inst.alpha_n);
        let orbit = iterate(&inst.f, fixed, 1);
        assert!(orbit.points.last().unwrap().dist(&fixed) < 1e-9);
        let base_mult = 4.0 * inst.beta_n * (inst.beta_n * inst.beta_n + inst.params.a);
        assert!(base_mult.abs() > 1.0);
        assert!(4.0 * inst.alpha_n.norm().powi(3) < 1.0);

        // the measured box is thin and stays inside the slab
        assert!(inst.epsilon_n > 0.0 && inst.epsilon_n < 0.6);
        assert!(inst.box_hull[0] >= -2.5 && inst.box_hull[1] <= 2.5);

        assert!(matches!(
            construct_example(2, 0.0),
            Err(BiquadError::Range(_))
        ));
    }
}

