//! The individual inequality checks. Every analytic check runs its chain in
//! outward-rounded interval arithmetic and then corroborates the same bound
//! on a sampled grid; the angle check is exact rational arithmetic.

use super::{CertifyError, LemmaParams, LemmaReport, Region};
use crate::biquad::ExampleInstance;
use crate::dynamics::SkewProduct;
use crate::invariant::repelling_fixed_points;
use crate::julia::{boundary_extract, filled_julia_base, GridSpec, BOUNDED};
use crate::numeric::{Poly, RealInterval};
use num_complex::Complex64;
use num_rational::Ratio;
use std::f64::consts::TAU;

/// Radius of the fiber trap disk: outside it the fiber map expands.
pub const FIBER_TRAP_RADIUS: f64 = 2.5;
/// The trap image radius: `|w| = 2.5` maps outside this whenever the base
/// point stays within distance 5 of 2.
pub const FIBER_TRAP_IMAGE: f64 = 17.5;
/// How far the base may sit from 2 for the trap estimate to hold.
const BASE_DIST_CAP: f64 = 5.0;
/// Strict cap on the excluded-disk radius in the contraction chain.
const CONTRACT_R_CAP: f64 = 7.0 / 128.0;
/// Contraction slab half-height used when a check needs one internally.
pub const DEFAULT_DELTA_PRIME: f64 = 0.2;
/// Excluded-disk radius used when a check needs one internally.
pub const DEFAULT_R: f64 = 1.0 / 32.0;
/// Iteration budget for the bounded-set sweep behind the box check.
const K_BOX_MAXITER: u32 = 512;
/// Deepest preimage tower the angle check accepts; `4^(depth+1)` must stay
/// an exact `i64`.
pub const MAX_ANGLE_DEPTH: usize = 25;
/// Cap on base samples fed to the orbit scans.
const MAX_BASE_SAMPLES: usize = 96;
/// Cap on real-axis samples fed to the slab escape scan.
const MAX_SLAB_SAMPLES: usize = 32;
/// Steps allowed for a strip orbit off the fixed point to leave the trap.
const ASIDE_STEPS: usize = 24;
/// Steps the strip over the fixed point must survive inside the trap.
const STAY_STEPS: usize = 96;

fn iv(x: f64) -> RealInterval {
    RealInterval::point(x)
}

/// Expansion of the fiber map away from the trap disk.
///
/// For every `z` in the region and `|w| = 5/2` the image modulus clears
/// 35/2, certifying that the disk complement traps escaping fiber orbits
/// as long as the base stays inside the region. The margin is the interval
/// lower bound for `|q_z(w)| - 35/2` at the worst base point; a polar grid
/// over the worst boundary circle corroborates it.
pub fn check_fiber_escape(z_region: &Region) -> Result<LemmaReport, CertifyError> {
    let two = Complex64::new(2.0, 0.0);
    let sup_d = z_region.sup_dist_to(two);
    if sup_d > BASE_DIST_CAP {
        return Err(CertifyError::PreconditionViolation(format!(
            "region reaches distance {sup_d:.4} from 2, beyond the cap {BASE_DIST_CAP}"
        )));
    }

    let d = iv(sup_d);
    let trap = iv(FIBER_TRAP_RADIUS);
    let inf_image = trap.powi(4).sub(iv(4.0).mul(d));
    let mut margin = inf_image.lo() - FIBER_TRAP_IMAGE;

    // the same lower bound minus 7|w| keeps growing in |w|, so the disk
    // boundary is the worst circle
    let mut monotone = true;
    let mut prev = inf_image.sub(iv(7.0).mul(trap)).lo();
    for radius in [3.0, 3.5, 4.0] {
        let r = iv(radius);
        let cur = r.powi(4).sub(iv(4.0).mul(d)).sub(iv(7.0).mul(r)).lo();
        monotone &= cur > prev;
        prev = cur;
    }
    if !monotone {
        margin = margin.min(-1.0);
    }

    let mut grid_min = f64::INFINITY;
    for i in 0..100 {
        let w = Complex64::from_polar(FIBER_TRAP_RADIUS, TAU * i as f64 / 100.0);
        for j in 0..100 {
            let z = two + Complex64::from_polar(sup_d, TAU * j as f64 / 100.0);
            grid_min = grid_min.min((w.powi(4) + 4.0 * (two - z)).norm());
        }
    }
    margin = margin.min(grid_min - FIBER_TRAP_IMAGE);

    Ok(LemmaReport::new(
        "fiber-escape",
        LemmaParams::default(),
        margin,
        format!(
            "sup |2-z| = {sup_d:.6}; interval inf |q| at |w|={FIBER_TRAP_RADIUS} is \
             {:.9} against {FIBER_TRAP_IMAGE}; monotone over radii 3, 3.5, 4: {monotone}; \
             grid min {grid_min:.6} over 10^4 boundary samples",
            inf_image.lo()
        ),
    ))
}

/// Bounding box of the base bounded set.
///
/// Sweeps the grid and boxes the pixels that never escape; the box must fit
/// `|x| <= 5/2` with height at most 1/4 on each side. A real segment of
/// bounded points has measure zero, so the grid must put a pixel row on the
/// real axis to see it: use odd pixel counts centered there.
pub fn check_k_box(
    p: &Poly,
    escape_radius: f64,
    grid: &GridSpec,
) -> Result<LemmaReport, CertifyError> {
    let sweep = filled_julia_base(p, grid, K_BOX_MAXITER, escape_radius);
    let Some([x0, x1, y0, y1]) = sweep.hull_of(|c| c == BOUNDED) else {
        return Ok(LemmaReport::new(
            "k-box",
            LemmaParams::default(),
            -1.0,
            "no pixel stayed bounded; nothing to box".into(),
        ));
    };
    let max_x = x0.abs().max(x1.abs());
    let eps = y0.abs().max(y1.abs());
    let margin = (FIBER_TRAP_RADIUS - max_x).min(0.25 - eps);
    Ok(LemmaReport::new(
        "k-box",
        LemmaParams {
            eps_n: eps,
            ..Default::default()
        },
        margin,
        format!(
            "bounded box [{x0:.6}, {x1:.6}] x [{y0:.6}, {y1:.6}] from {} pixels; \
             needs |x| <= {FIBER_TRAP_RADIUS} and |y| <= 0.25",
            sweep.bounded_count()
        ),
    ))
}

/// Boundary pixels of the base bounded set plus the repelling fixed points,
/// the standard sample set for base-side orbit scans.
fn base_julia_samples(inst: &ExampleInstance) -> Result<Vec<Complex64>, CertifyError> {
    let b = inst.box_hull;
    let spec = GridSpec::new(
        Complex64::new(0.5 * (b[0] + b[1]), 0.5 * (b[2] + b[3])),
        0.55 * (b[1] - b[0]),
        (0.55 * (b[3] - b[2])).max(0.1),
        256,
        128,
    )?;
    let grid = filled_julia_base(inst.f.base(), &spec, 256, inst.f.base_escape_radius());
    let cloud = boundary_extract(&grid)?;
    let pts = cloud
        .plane_points()
        .ok_or_else(|| CertifyError::PreconditionViolation("boundary cloud not planar".into()))?;
    let stride = (pts.len() / MAX_BASE_SAMPLES).max(1);
    let mut out: Vec<Complex64> = pts.iter().step_by(stride).copied().collect();
    out.extend(repelling_fixed_points(inst.f.base()));
    Ok(out)
}

/// Observed worst first-entry time into the left half plane, or None when
/// every sample fell inside the excluded disk.
pub(crate) fn reach_scan(
    inst: &ExampleInstance,
    r: f64,
    n_max: usize,
) -> Result<(Option<usize>, usize), CertifyError> {
    let two = Complex64::new(2.0, 0.0);
    let kept: Vec<Complex64> = base_julia_samples(inst)?
        .into_iter()
        .filter(|z| (z - two).norm() > r)
        .collect();
    if kept.is_empty() {
        return Ok((None, 0));
    }
    let p = inst.f.base();
    let mut n_obs = 0usize;
    for &z0 in &kept {
        let mut z = z0;
        let mut hit = None;
        for j in 0..=n_max {
            if z.re <= 1.0 {
                hit = Some(j);
                break;
            }
            z = p.eval(z);
        }
        match hit {
            Some(j) => n_obs = n_obs.max(j),
            None => return Err(CertifyError::Unreached { z: z0, n_max }),
        }
    }
    Ok((Some(n_obs), kept.len()))
}

/// Every sampled base point away from the fixed-point disk visits the left
/// half plane `Re z <= 1` within a bounded number of steps.
///
/// The margin counts the unused steps of the budget; samples that start in
/// the left half contribute entry time zero. An excluded disk swallowing
/// every sample passes vacuously and says so.
pub fn check_reach_left(
    inst: &ExampleInstance,
    r: f64,
    n_max: usize,
) -> Result<LemmaReport, CertifyError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(CertifyError::PreconditionViolation(format!(
            "excluded radius must be positive, got {r}"
        )));
    }
    if n_max == 0 {
        return Err(CertifyError::PreconditionViolation(
            "need at least one step of budget".into(),
        ));
    }
    let params = LemmaParams {
        n: inst.n,
        r,
        eps_n: inst.epsilon_n,
        n_steps: n_max,
        ..Default::default()
    };
    match reach_scan(inst, r, n_max)? {
        (None, _) => Ok(LemmaReport::new(
            "reach-left",
            params,
            1.0,
            "vacuous: every sample sits inside the excluded disk".into(),
        )),
        (Some(n_obs), n_samples) => Ok(LemmaReport::new(
            "reach-left",
            params,
            (n_max - n_obs) as f64 + 1.0,
            format!(
                "{n_samples} samples outside the disk of radius {r:.6} about 2 \
                 all reached Re z <= 1 within {n_obs} steps (budget {n_max})"
            ),
        )),
    }
}

/// The geometric-growth budget for slab orbits: `64^N (delta + 4 eps / 63)`
/// must stay below `sqrt(6)/10`, the slab height under which the fiber
/// fourth power still pushes the real part past the trap radius.
pub fn check_escape_constant(
    n_steps: usize,
    delta: f64,
    eps_n: f64,
) -> Result<LemmaReport, CertifyError> {
    if n_steps == 0 {
        return Err(CertifyError::PreconditionViolation(
            "need at least one step".into(),
        ));
    }
    if !(delta >= 0.0) || !delta.is_finite() || !(eps_n >= 0.0) || !eps_n.is_finite() {
        return Err(CertifyError::PreconditionViolation(format!(
            "heights must be finite and nonnegative, got delta = {delta}, eps = {eps_n}"
        )));
    }
    let lhs = iv(64.0)
        .powi(n_steps as u32)
        .mul(iv(delta).add(iv(4.0).mul(iv(eps_n)).div(iv(63.0))?));
    let rhs = iv(6.0).sqrt()?.div(iv(10.0))?;
    let margin = rhs.lo() - lhs.hi();
    Ok(LemmaReport::new(
        "escape-constant",
        LemmaParams {
            delta,
            eps_n,
            n_steps,
            ..Default::default()
        },
        margin,
        format!(
            "64^{n_steps} (delta + 4 eps / 63) <= {:.12e} against sqrt(6)/10 >= {:.12}",
            lhs.hi(),
            rhs.lo()
        ),
    ))
}

/// Orbit engine behind the empirical slab escape check. Runs the fiber
/// orbit of a grid over the slab `|Re w| <= 5/2, |Im w| < delta` along the
/// real base orbit of each sample, verifying the per-step growth bound
/// `|Im w'| < 64 |Im w| + 4 eps` while the orbit is still inside the trap
/// disk, and that every orbit has left the disk by step `n_steps`. Once
/// outside, the expansion certified by the fiber trap keeps it outside, so
/// the scan stops following it.
fn escape_scan(
    f: &SkewProduct,
    base_samples: &[f64],
    delta: f64,
    eps_claim: f64,
    n_steps: usize,
) -> Result<(f64, usize), CertifyError> {
    let constant = check_escape_constant(n_steps, delta, eps_claim)?;
    if !constant.pass {
        return Err(CertifyError::PreconditionViolation(format!(
            "growth budget fails first: {}",
            constant.evidence
        )));
    }
    if !(delta > 0.0) || !(eps_claim > 0.0) {
        return Err(CertifyError::PreconditionViolation(
            "slab heights must be positive for the orbit scan".into(),
        ));
    }
    if base_samples.is_empty() {
        return Err(CertifyError::PreconditionViolation(
            "no base samples to scan".into(),
        ));
    }

    let mut margin = f64::INFINITY;
    let mut orbits = 0usize;
    for &x0 in base_samples {
        // the base polynomial is real, so the orbit of a real sample stays
        // exactly real and the claimed height bound on Im z holds with room
        let mut zs = Vec::with_capacity(n_steps);
        let mut x = x0;
        for _ in 0..n_steps {
            zs.push(Complex64::new(x, 0.0));
            x = f.base().eval(Complex64::new(x, 0.0)).re;
        }
        for i in 0..=40 {
            let u0 = -FIBER_TRAP_RADIUS + 2.0 * FIBER_TRAP_RADIUS * i as f64 / 40.0;
            for s in [-0.75, -0.25, 0.25, 0.75] {
                let w0 = Complex64::new(u0, s * delta);
                let mut w = w0;
                let mut exit = None;
                for &z in &zs {
                    let w_next = f.fiber().eval(z, w);
                    let bound = 64.0 * w.im.abs() + 4.0 * eps_claim;
                    if w_next.im.abs() >= bound {
                        return Err(CertifyError::CounterexampleFound { z, w });
                    }
                    w = w_next;
                    if w.norm() > FIBER_TRAP_RADIUS {
                        exit = Some(w.norm() - FIBER_TRAP_RADIUS);
                        break;
                    }
                }
                match exit {
                    Some(m) => margin = margin.min(m),
                    None => {
                        return Err(CertifyError::CounterexampleFound {
                            z: Complex64::new(x0, 0.0),
                            w: w0,
                        })
                    }
                }
                orbits += 1;
            }
        }
    }
    Ok((margin, orbits))
}

/// Real-axis projections of the base boundary samples outside the excluded
/// disk, deduplicated and capped.
fn real_samples_outside(inst: &ExampleInstance, r: f64) -> Result<Vec<f64>, CertifyError> {
    let mut xs: Vec<f64> = base_julia_samples(inst)?
        .into_iter()
        .map(|z| z.re)
        .filter(|x| (x - 2.0).abs() > r)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let stride = (xs.len() / MAX_SLAB_SAMPLES).max(1);
    Ok(xs.into_iter().step_by(stride).collect())
}

/// Slab escape on the instance itself: over sampled base points away from
/// the fixed-point disk, every fiber orbit started in the thin slab leaves
/// the trap disk within the given number of steps.
///
/// Samples are the real projections of the base boundary cloud; the base is
/// a real polynomial, so the projected orbits are exactly real and the
/// measured slab height of the instance honestly bounds their imaginary
/// drift. Refuses to run unless the growth budget for the same constants
/// passes first.
pub fn check_escape_empirical(
    inst: &ExampleInstance,
    r: f64,
    delta: f64,
    n_steps: usize,
) -> Result<LemmaReport, CertifyError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(CertifyError::PreconditionViolation(format!(
            "excluded radius must be positive, got {r}"
        )));
    }
    let eps = inst.epsilon_n;
    let samples = real_samples_outside(inst, r)?;
    let (margin, orbits) = escape_scan(&inst.f, &samples, delta, eps, n_steps)?;
    Ok(LemmaReport::new(
        "escape-empirical",
        LemmaParams {
            n: inst.n,
            r,
            delta,
            eps_n: eps,
            n_steps,
            ..Default::default()
        },
        margin,
        format!(
            "{orbits} slab orbits over {} base samples all left the trap disk \
             within {n_steps} steps; tightest exit excess {margin:.6}",
            samples.len()
        ),
    ))
}

/// The strip contraction chain: the fiber map sends the strip
/// `|Re w| <= 1/4, |Im w| <= delta_prime` into its own interior whenever
/// the base point sits within `r` of 2 and within `eps_n` of the real axis.
///
/// Both coordinate chains run in interval arithmetic; a grid over the strip
/// times the disk section corroborates the image bounds.
pub fn check_contract(
    r: f64,
    delta_prime: f64,
    eps_n: f64,
) -> Result<LemmaReport, CertifyError> {
    if !(r > 0.0) || !(r < CONTRACT_R_CAP) {
        return Err(CertifyError::PreconditionViolation(format!(
            "disk radius must sit strictly inside (0, 7/128), got {r}"
        )));
    }
    if !(delta_prime > 0.0) || !(delta_prime < 0.25) {
        return Err(CertifyError::PreconditionViolation(format!(
            "strip height must sit in (0, 1/4), got {delta_prime}"
        )));
    }
    if !(eps_n >= 0.0) || !(eps_n <= delta_prime / 8.0) {
        return Err(CertifyError::PreconditionViolation(format!(
            "axis height must satisfy 0 <= eps <= delta_prime / 8, got {eps_n}"
        )));
    }

    let dp = iv(delta_prime);
    let e = iv(eps_n);
    let rr = iv(r);
    // sup of |w|^2 over the strip
    let sq = iv(1.0 / 16.0).add(dp.powi(2));
    // |Im w^4| <= 4 |w|^2 |Re w| |Im w|, then the base displacement
    let v_chain = iv(4.0).mul(sq).mul(iv(0.25)).mul(dp).add(iv(4.0).mul(e));
    let margin_v = delta_prime - v_chain.hi();
    // |Re w^4| <= |w|^4 plus the doubled cross term, then the displacement
    let u_chain = sq
        .powi(2)
        .add(iv(4.0).mul(dp.powi(2)).div(iv(16.0))?)
        .add(iv(4.0).mul(rr));
    let margin_u = 0.25 - u_chain.hi();

    let mut grid_max_re = 0.0f64;
    let mut grid_max_im = 0.0f64;
    for i in 0..21 {
        let u = -0.25 + 0.5 * i as f64 / 20.0;
        for j in 0..9 {
            let v = -delta_prime + 2.0 * delta_prime * j as f64 / 8.0;
            let w = Complex64::new(u, v);
            let w4 = w.powi(4);
            for k in 0..7 {
                let x = 2.0 - r + 2.0 * r * k as f64 / 6.0;
                for s in [-1.0, 0.0, 1.0] {
                    let z = Complex64::new(x, s * eps_n);
                    let q = w4 + 4.0 * (Complex64::new(2.0, 0.0) - z);
                    grid_max_re = grid_max_re.max(q.re.abs());
                    grid_max_im = grid_max_im.max(q.im.abs());
                }
            }
        }
    }
    let margin = margin_v
        .min(margin_u)
        .min(delta_prime - grid_max_im)
        .min(0.25 - grid_max_re);

    Ok(LemmaReport::new(
        "contract",
        LemmaParams {
            r,
            delta_prime,
            eps_n,
            ..Default::default()
        },
        margin,
        format!(
            "Im chain {:.9} against {delta_prime} (margin {margin_v:.9}); \
             Re chain {:.9} against 0.25 (margin {margin_u:.9}); \
             grid image max |Re| {grid_max_re:.6}, max |Im| {grid_max_im:.6}",
            v_chain.hi(),
            u_chain.hi()
        ),
    ))
}

/// Open intervals of angles in R/Z with exact rational endpoints.
#[derive(Debug, Clone, Default)]
pub struct AngleIntervalSet {
    intervals: Vec<(Ratio<i64>, Ratio<i64>)>,
}

/// Shifts an open interval by an integer so its left endpoint lands in
/// [0, 1); the interval must not straddle an integer afterwards.
fn reduce_mod1(
    lo: Ratio<i64>,
    hi: Ratio<i64>,
) -> Result<(Ratio<i64>, Ratio<i64>), CertifyError> {
    if lo >= hi {
        return Err(CertifyError::PreconditionViolation(format!(
            "empty angle interval ({lo}, {hi})"
        )));
    }
    let shift = lo.floor();
    let (lo, hi) = (lo - shift, hi - shift);
    if hi > Ratio::from_integer(1) {
        return Err(CertifyError::PreconditionViolation(format!(
            "angle interval straddles an integer after reduction: ({lo}, {hi})"
        )));
    }
    Ok((lo, hi))
}

impl AngleIntervalSet {
    pub fn new() -> Self {
        AngleIntervalSet::default()
    }

    pub fn push(&mut self, lo: Ratio<i64>, hi: Ratio<i64>) -> Result<(), CertifyError> {
        self.intervals.push(reduce_mod1(lo, hi)?);
        Ok(())
    }

    pub fn intervals(&self) -> &[(Ratio<i64>, Ratio<i64>)] {
        &self.intervals
    }

    /// Merged union. Intervals are open, so endpoints that merely touch do
    /// not merge: the shared endpoint would be missing from the union.
    pub fn union_merged(&self) -> Vec<(Ratio<i64>, Ratio<i64>)> {
        let mut v = self.intervals.clone();
        v.sort();
        let mut out: Vec<(Ratio<i64>, Ratio<i64>)> = Vec::new();
        for (lo, hi) in v {
            match out.last_mut() {
                Some((_, end)) if lo < *end => {
                    if hi > *end {
                        *end = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        out
    }

    /// True when a single merged interval strictly contains `[lo, hi]`.
    pub fn covers(&self, lo: Ratio<i64>, hi: Ratio<i64>) -> bool {
        self.union_merged().iter().any(|&(a, b)| a < lo && b > hi)
    }

    /// Smallest positive overlap between consecutive intervals, the
    /// bottleneck of the chain, as a float.
    pub fn min_overlap(&self) -> Option<f64> {
        let mut v = self.intervals.clone();
        v.sort();
        let mut best: Option<Ratio<i64>> = None;
        for pair in v.windows(2) {
            let (_, hi_a) = pair[0];
            let (lo_b, hi_b) = pair[1];
            if lo_b < hi_a {
                let overlap = hi_a.min(hi_b) - lo_b;
                best = Some(match best {
                    Some(b) => b.min(overlap),
                    None => overlap,
                });
            }
        }
        best.map(|b| *b.numer() as f64 / *b.denom() as f64)
    }
}

/// Angle combinatorics of quadrupling, in exact rational arithmetic.
///
/// Verifies that quadrupling sends both seed intervals onto the target arc
/// (3/16, 13/16) mod 1, and that the tower of shrinking preimage intervals
/// near 0 and 1 down to depth `4^-(depth+1)` covers every angle in
/// `[4^-depth, 1 - 4^-depth]`. The margin is the bottleneck overlap of the
/// tower, `4^-(depth+1)` exactly.
pub fn check_angle_combinatorics(depth: usize) -> Result<LemmaReport, CertifyError> {
    if depth < 2 || depth > MAX_ANGLE_DEPTH {
        return Err(CertifyError::PreconditionViolation(format!(
            "depth must sit in [2, {MAX_ANGLE_DEPTH}], got {depth}"
        )));
    }
    let q = |num: i64, den: i64| Ratio::new(num, den);
    let four = Ratio::from_integer(4);
    let one = Ratio::from_integer(1);

    let target = (q(3, 16), q(13, 16));
    let quad_a = reduce_mod1(q(3, 64) * four, q(13, 64) * four)?;
    let quad_b = reduce_mod1(q(51, 64) * four, q(61, 64) * four)?;
    let seeds_ok = quad_a == target && quad_b == target;

    let mut set = AngleIntervalSet::new();
    for j in 2..=(depth as u32 + 1) {
        let den = 4i64.pow(j);
        set.push(q(3, den), q(13, den))?;
        set.push(one - q(13, den), one - q(3, den))?;
    }
    let eta = Ratio::new(1, 4i64.pow(depth as u32));
    let covered = set.covers(eta, one - eta);
    let merged = set.union_merged();

    let margin = if seeds_ok && covered {
        set.min_overlap().unwrap_or(-1.0)
    } else {
        -1.0
    };
    Ok(LemmaReport::new(
        "angle-combinatorics",
        LemmaParams {
            n_steps: depth,
            ..Default::default()
        },
        margin,
        format!(
            "quadrupled seeds land on (3/16, 13/16): {seeds_ok}; tower of {} \
             intervals merges to {} piece(s) covering [4^-{depth}, 1 - 4^-{depth}]: \
             {covered}; bottleneck overlap 4^-{}",
            set.intervals().len(),
            merged.len(),
            depth + 1
        ),
    ))
}

/// Strip orbit scan behind the critical-disjointness check: over the base
/// fixed point the whole strip `|Re w| <= 1/4, |Im w| <= delta` stays
/// inside the trap disk under the frozen fiber map, while over every other
/// sampled base point the strip leaves the trap along the drifting orbit.
/// Returns the stay margin, the escape margin and the aside sample count.
fn strip_scan(
    inst: &ExampleInstance,
    delta: f64,
) -> Result<(f64, f64, usize), CertifyError> {
    let f = &inst.f;
    let beta = Complex64::new(inst.beta_n, 0.0);
    let frozen = f.fiber().fiber_poly(beta);

    let mut max_stay = 0.0f64;
    for i in 0..21 {
        let u = -0.25 + 0.5 * i as f64 / 20.0;
        for j in 0..9 {
            let v = -delta + 2.0 * delta * j as f64 / 8.0;
            let mut w = Complex64::new(u, v);
            for _ in 0..STAY_STEPS {
                max_stay = max_stay.max(w.norm());
                if w.norm() > FIBER_TRAP_RADIUS {
                    break;
                }
                w = frozen.eval(w);
            }
            max_stay = max_stay.max(w.norm());
        }
    }
    let margin_stay = FIBER_TRAP_RADIUS - max_stay;

    // base points near but not equal to the fixed point are the tight case;
    // one pixel of separation is the finest the sample grid can attest
    let aside: Vec<f64> = real_samples_outside(inst, 0.0)?
        .into_iter()
        .filter(|x| (x - inst.beta_n).abs() > 1e-3)
        .collect();
    if aside.is_empty() {
        return Err(CertifyError::PreconditionViolation(
            "no base samples away from the fixed point".into(),
        ));
    }
    let mut margin_escape = f64::INFINITY;
    for &x0 in &aside {
        let mut zs = Vec::with_capacity(ASIDE_STEPS);
        let mut x = x0;
        for _ in 0..ASIDE_STEPS {
            zs.push(Complex64::new(x, 0.0));
            x = f.base().eval(Complex64::new(x, 0.0)).re;
        }
        for i in 0..11 {
            let u = -0.25 + 0.5 * i as f64 / 10.0;
            for j in 0..5 {
                let v = -delta + 2.0 * delta * j as f64 / 4.0;
                let w0 = Complex64::new(u, v);
                let mut w = w0;
                let mut exit = None;
                for &z in &zs {
                    w = f.fiber().eval(z, w);
                    if w.norm() > FIBER_TRAP_RADIUS {
                        exit = Some(w.norm() - FIBER_TRAP_RADIUS);
                        break;
                    }
                }
                match exit {
                    Some(m) => margin_escape = margin_escape.min(m),
                    None => {
                        return Err(CertifyError::CounterexampleFound {
                            z: Complex64::new(x0, 0.0),
                            w: w0,
                        })
                    }
                }
            }
        }
    }
    Ok((margin_stay, margin_escape, aside.len()))
}

/// Disjointness of the critical strip from the fiber bounded sets away from
/// the base fixed point: over the fixed point the strip stays trapped, over
/// every other sampled base point it escapes.
///
/// Refuses to run unless the supporting chains hold at the instance's
/// measured axis height: the contraction chain and, with the worst observed
/// left-entry time, the slab growth budget. At coarse measured heights the
/// budget is the binding constraint.
pub fn check_critical_disjoint(
    inst: &ExampleInstance,
    delta: f64,
) -> Result<LemmaReport, CertifyError> {
    if !(delta > 0.0) || !(delta < 0.25) {
        return Err(CertifyError::PreconditionViolation(format!(
            "strip height must sit in (0, 1/4), got {delta}"
        )));
    }
    if delta > DEFAULT_DELTA_PRIME {
        return Err(CertifyError::PreconditionViolation(format!(
            "strip height {delta} exceeds the certified contraction slab {DEFAULT_DELTA_PRIME}"
        )));
    }
    let eps = inst.epsilon_n;
    let contract = check_contract(DEFAULT_R, DEFAULT_DELTA_PRIME, eps)?;
    if !contract.pass {
        return Err(CertifyError::PreconditionViolation(format!(
            "contraction chain fails: {}",
            contract.evidence
        )));
    }
    let (n_obs, _) = reach_scan(inst, DEFAULT_R, 16)?;
    let n_steps = n_obs.unwrap_or(0) + 1;
    let constant = check_escape_constant(n_steps, delta, eps)?;
    if !constant.pass {
        return Err(CertifyError::PreconditionViolation(format!(
            "growth budget cannot absorb the measured axis height {eps:.3e} at N = {n_steps}: {}",
            constant.evidence
        )));
    }

    let (margin_stay, margin_escape, n_aside) = strip_scan(inst, delta)?;
    Ok(LemmaReport::new(
        "critical-disjoint",
        LemmaParams {
            n: inst.n,
            r: DEFAULT_R,
            delta,
            delta_prime: DEFAULT_DELTA_PRIME,
            eps_n: eps,
            n_steps,
        },
        margin_stay.min(margin_escape),
        format!(
            "strip stays trapped over the fixed point (margin {margin_stay:.6}) and \
             escapes over {n_aside} other base samples (margin {margin_escape:.6})"
        ),
    ))
}
