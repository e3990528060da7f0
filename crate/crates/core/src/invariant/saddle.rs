//! Saddle periodic points and arcs of their unstable manifolds.

use num_complex::Complex64;

use super::{InvariantError, COMPONENT_RADIUS};
use crate::dynamics::{Point2, SkewProduct};
use crate::numeric::{poly_roots, Poly, DEFAULT_ROOT_TOL};

/// Periods beyond this make the base polynomial `p^k(z) - z` too large to
/// solve reliably.
const MAX_SADDLE_PERIOD: usize = 3;

/// Two candidate periodic points closer than this are the same point.
const SADDLE_DEDUP_TOL: f64 = 1e-6;

/// A cycle must close up to this distance to be accepted.
const PERIODICITY_TOL: f64 = 1e-8;

/// Sample count of a grown unstable arc.
const ARC_POINTS: usize = 1025;

/// Growth stops once the polyline reaches this arclength.
const MAX_ARC_LEN: f64 = 64.0;

/// A periodic point that expands along the base and contracts along the
/// fiber. Multipliers are over the full cycle.
#[derive(Debug, Clone)]
pub struct SaddlePoint {
    pub location: Point2,
    pub period: usize,
    pub base_multiplier: Complex64,
    pub fiber_multiplier: Complex64,
    /// 1-based component label, contiguous in order of first appearance.
    pub component_index: usize,
}

/// All saddle cycles found up to a period bound, grouped into components.
#[derive(Debug, Clone)]
pub struct SaddleSetEstimate {
    pub saddles: Vec<SaddlePoint>,
    pub n_components: usize,
}

impl SaddleSetEstimate {
    /// The saddle points carrying the given 1-based component label.
    pub fn component(&self, index: usize) -> Vec<&SaddlePoint> {
        self.saddles
            .iter()
            .filter(|s| s.component_index == index)
            .collect()
    }
}

/// Finds all saddle cycles of pair period up to `max_period`: base-periodic
/// points with expanding base multiplier whose frozen fiber return map has a
/// contracting periodic point. Each cycle contributes all of its points.
///
/// Components group saddles that lie within [`COMPONENT_RADIUS`] of each
/// other or belong to a common cycle.
pub fn find_saddles(
    f: &SkewProduct,
    max_period: usize,
) -> Result<SaddleSetEstimate, InvariantError> {
    if max_period == 0 {
        return Err(InvariantError::Invalid(
            "need at least period 1".to_string(),
        ));
    }
    if max_period > MAX_SADDLE_PERIOD {
        return Err(InvariantError::DegreeOverflow {
            requested: max_period,
            cap: MAX_SADDLE_PERIOD,
        });
    }
    let identity = Poly::from_real(&[0.0, 1.0]);
    let p_prime = f.base().derivative();
    let dq_dw = f.fiber().partial_w();

    // saddle records plus the id of the cycle each point came from
    let mut found: Vec<(SaddlePoint, usize)> = Vec::new();
    let mut next_cycle = 0usize;
    for k in 1..=max_period {
        let pk_minus_z = f.base().iterate_compose(k).sub(&identity);
        let zroots = poly_roots(&pk_minus_z, DEFAULT_ROOT_TOL)?;
        for &(z0, _) in &zroots.roots {
            let mut zs = Vec::with_capacity(k);
            let mut zc = z0;
            for _ in 0..k {
                zs.push(zc);
                zc = f.base().eval(zc);
            }
            let base_mult: Complex64 = zs.iter().map(|&z| p_prime.eval(z)).product();
            if base_mult.norm() <= 1.0 {
                continue;
            }
            let mut ret = identity.clone();
            for &z in &zs {
                ret = f.fiber().fiber_poly(z).compose(&ret);
            }
            let wroots = poly_roots(&ret.sub(&identity), DEFAULT_ROOT_TOL)?;
            for &(w0, _) in &wroots.roots {
                let mut fiber_mult = Complex64::new(1.0, 0.0);
                let mut wc = w0;
                for &z in &zs {
                    fiber_mult *= dq_dw.eval(z, wc);
                    wc = f.fiber().eval(z, wc);
                }
                if fiber_mult.norm() >= 1.0 {
                    continue;
                }
                let mut cycle = Vec::with_capacity(k);
                let mut pt = Point2::new(z0, w0);
                for _ in 0..k {
                    cycle.push(pt);
                    pt = f.step(pt);
                }
                if pt.dist(&cycle[0]) > PERIODICITY_TOL {
                    continue;
                }
                let mut fresh = false;
                for &pc in &cycle {
                    if found
                        .iter()
                        .any(|(s, _)| s.location.dist(&pc) < SADDLE_DEDUP_TOL)
                    {
                        continue;
                    }
                    fresh = true;
                    found.push((
                        SaddlePoint {
                            location: pc,
                            period: k,
                            base_multiplier: base_mult,
                            fiber_multiplier: fiber_mult,
                            component_index: 0,
                        },
                        next_cycle,
                    ));
                }
                if fresh {
                    next_cycle += 1;
                }
            }
        }
    }

    found.sort_by(|(a, _), (b, _)| {
        a.period
            .cmp(&b.period)
            .then(a.location.z.re.total_cmp(&b.location.z.re))
            .then(a.location.z.im.total_cmp(&b.location.z.im))
            .then(a.location.w.re.total_cmp(&b.location.w.re))
            .then(a.location.w.im.total_cmp(&b.location.w.im))
    });

    // single linkage by distance, strengthened so cycle mates always join
    let n = found.len();
    let linked = |i: usize, j: usize| -> bool {
        found[i].1 == found[j].1
            || found[i].0.location.dist(&found[j].0.location) <= COMPONENT_RADIUS
    };
    let mut label = vec![usize::MAX; n];
    let mut n_components = 0;
    let mut stack = Vec::new();
    for i in 0..n {
        if label[i] != usize::MAX {
            continue;
        }
        label[i] = n_components;
        stack.push(i);
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if label[b] == usize::MAX && linked(a, b) {
                    label[b] = n_components;
                    stack.push(b);
                }
            }
        }
        n_components += 1;
    }
    let saddles = found
        .into_iter()
        .zip(&label)
        .map(|((mut s, _), &l)| {
            s.component_index = l + 1;
            s
        })
        .collect();
    Ok(SaddleSetEstimate {
        saddles,
        n_components,
    })
}

/// A polyline along the unstable manifold of a fixed saddle, grown by
/// iterating a short seed segment tangent to the unstable direction.
///
/// The tangent has slope `s = q_z / (lambda - q_w)` over the base direction,
/// the unique line through the saddle that the lower-triangular differential
/// maps to itself. The polyline always passes through the anchor; growth
/// resamples by arclength each generation.
#[derive(Debug, Clone)]
pub struct UnstableArc {
    pub anchor: SaddlePoint,
    /// Fiber-over-base slope of the unstable tangent.
    pub direction: Complex64,
    pub points: Vec<Point2>,
    /// Generations actually applied (growth stops at [`MAX_ARC_LEN`]).
    pub growth_iters: usize,
}

impl UnstableArc {
    pub fn arclength(&self) -> f64 {
        polyline_len(&self.points)
    }

    /// Distance from a point to the arc polyline (closest segment).
    pub fn dist_to(&self, pt: &Point2) -> f64 {
        self.points
            .windows(2)
            .map(|seg| segment_dist(pt, &seg[0], &seg[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn unstable_arc(
    f: &SkewProduct,
    saddle: &SaddlePoint,
    seed_len: f64,
    growth_iters: usize,
) -> Result<UnstableArc, InvariantError> {
    if saddle.period != 1 {
        return Err(InvariantError::Invalid(format!(
            "arc growth needs a fixed saddle; compose the map for period {}",
            saddle.period
        )));
    }
    if !(seed_len > 0.0) || !seed_len.is_finite() {
        return Err(InvariantError::Invalid(format!(
            "seed length must be positive, got {seed_len}"
        )));
    }
    let z0 = saddle.location.z;
    let w0 = saddle.location.w;
    let lambda = f.base().derivative().eval(z0);
    let qw = f.fiber().partial_w().eval(z0, w0);
    let qz = f.fiber().partial_z().eval(z0, w0);
    let denom = lambda - qw;
    if denom.norm() < 1e-8 {
        return Err(InvariantError::Resonance {
            denom: denom.norm(),
        });
    }
    let s = qz / denom;

    let scale = (1.0 + s.norm_sqr()).sqrt();
    let mut points: Vec<Point2> = (0..ARC_POINTS)
        .map(|i| {
            let t = seed_len * (2.0 * i as f64 / (ARC_POINTS - 1) as f64 - 1.0) / scale;
            Point2::new(z0 + t, w0 + s * t)
        })
        .collect();
    let mut applied = 0;
    for _ in 0..growth_iters {
        let mapped: Vec<Point2> = points.iter().map(|&p| f.step(p)).collect();
        points = resample_polyline(&mapped, ARC_POINTS);
        applied += 1;
        if polyline_len(&points) > MAX_ARC_LEN {
            break;
        }
    }
    Ok(UnstableArc {
        anchor: saddle.clone(),
        direction: s,
        points,
        growth_iters: applied,
    })
}

fn polyline_len(pts: &[Point2]) -> f64 {
    pts.windows(2).map(|p| p[0].dist(&p[1])).sum()
}

fn resample_polyline(pts: &[Point2], count: usize) -> Vec<Point2> {
    let mut cum = Vec::with_capacity(pts.len());
    cum.push(0.0);
    for i in 1..pts.len() {
        cum.push(cum[i - 1] + pts[i - 1].dist(&pts[i]));
    }
    let total = *cum.last().unwrap();
    if total == 0.0 {
        return vec![pts[0]; count];
    }
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for i in 0..count {
        let target = total * i as f64 / (count - 1) as f64;
        while seg + 2 < cum.len() && cum[seg + 1] < target {
            seg += 1;
        }
        let d = cum[seg + 1] - cum[seg];
        let u = if d > 0.0 {
            ((target - cum[seg]) / d).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (a, b) = (pts[seg], pts[seg + 1]);
        out.push(Point2::new(a.z + (b.z - a.z) * u, a.w + (b.w - a.w) * u));
    }
    out
}

/// Distance in C^2 from `pt` to the segment `[a, b]`, treating the segment
/// as a real line segment in R^4.
fn segment_dist(pt: &Point2, a: &Point2, b: &Point2) -> f64 {
    let dz = b.z - a.z;
    let dw = b.w - a.w;
    let len2 = dz.norm_sqr() + dw.norm_sqr();
    if len2 == 0.0 {
        return pt.dist(a);
    }
    let pz = pt.z - a.z;
    let pw = pt.w - a.w;
    // real inner product of (pz, pw) with (dz, dw)
    let dot = pz.re * dz.re + pz.im * dz.im + pw.re * dw.re + pw.im * dw.im;
    let t = (dot / len2).clamp(0.0, 1.0);
    let proj = Point2::new(a.z + dz * t, a.w + dw * t);
    pt.dist(&proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biquad::{construct_example, product_preset};
    use crate::dynamics::iterate;
    use crate::numeric::Poly;

    fn golden() -> (f64, f64) {
        ((1.0 + 5.0f64.sqrt()) / 2.0, (1.0 - 5.0f64.sqrt()) / 2.0)
    }

    #[test]
    fn product_with_power_fiber_has_two_saddle_fixed_points() {
        let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
        let f = product_preset(&p, &Poly::from_real(&[0.0, 0.0, 1.0])).unwrap();
        let est = find_saddles(&f, 1).unwrap();
        assert_eq!(est.saddles.len(), 2);
        assert_eq!(est.n_components, 2);
        let (phi, psi) = golden();
        for s in &est.saddles {
            assert!(s.location.w.norm() < 1e-9);
            assert!(s.base_multiplier.norm() > 1.0);
            assert!(s.fiber_multiplier.norm() < 1e-9);
            assert_eq!(s.period, 1);
            let back = iterate(&f, s.location, s.period);
            assert!(back.points.last().unwrap().dist(&s.location) < 1e-8);
        }
        let mut zs: Vec<f64> = est.saddles.iter().map(|s| s.location.z.re).collect();
        zs.sort_by(f64::total_cmp);
        assert!((zs[0] - psi).abs() < 1e-9);
        assert!((zs[1] - phi).abs() < 1e-9);

        assert!(matches!(
            find_saddles(&f, 4),
            Err(InvariantError::DegreeOverflow { .. })
        ));
        assert!(find_saddles(&f, 0).is_err());
    }

    #[test]
    fn doubled_product_saddles_come_in_cycles() {
        let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
        let f = product_preset(&p, &p).unwrap();
        assert!(find_saddles(&f, 1).unwrap().saddles.is_empty());

        let est = find_saddles(&f, 2).unwrap();
        assert_eq!(est.saddles.len(), 4);
        assert_eq!(est.n_components, 2);
        for s in &est.saddles {
            assert_eq!(s.period, 2);
            assert!(s.base_multiplier.norm() > 1.0);
            assert!(s.fiber_multiplier.norm() < 1e-9);
            assert!(s.location.w.norm() < 1e-8 || (s.location.w + 1.0).norm() < 1e-8);
            let back = iterate(&f, s.location, 2);
            assert!(back.points.last().unwrap().dist(&s.location) < 1e-8);
        }
        // cycle mates over a common base point share a component even though
        // they are a unit apart
        for i in 1..=2 {
            let comp = est.component(i);
            assert_eq!(comp.len(), 2);
            assert!((comp[0].location.z - comp[1].location.z).norm() < 1e-9);
            assert!((comp[0].location.w - comp[1].location.w).norm() > 0.9);
        }
    }

    #[test]
    fn perturbed_instance_has_one_saddle() {
        let inst = construct_example(1, 1e-3).unwrap();
        let est = find_saddles(&inst.f, 2).unwrap();
        assert_eq!(est.n_components, 1);
        assert_eq!(est.saddles.len(), 1);
        let s = &est.saddles[0];
        assert_eq!(s.period, 1);
        let expect = Point2::new(Complex64::new(inst.beta_n, 0.0), inst.alpha_n);
        assert!(s.location.dist(&expect) < 1e-8);
        assert!(s.base_multiplier.norm() > 1.0);
        assert!(s.fiber_multiplier.norm() < 1.0);
    }

    #[test]
    fn horizontal_arc_of_a_product_map() {
        let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
        let f = product_preset(&p, &Poly::from_real(&[0.0, 0.0, 1.0])).unwrap();
        let est = find_saddles(&f, 1).unwrap();
        let (phi, _) = golden();
        let saddle = est
            .saddles
            .iter()
            .find(|s| (s.location.z.re - phi).abs() < 1e-9)
            .unwrap();
        let arc = unstable_arc(&f, saddle, 0.02, 3).unwrap();
        assert!(arc.direction.norm() < 1e-12);
        assert_eq!(arc.growth_iters, 3);
        for pt in &arc.points {
            assert!(pt.w.norm() < 1e-12, "arc left the invariant line");
            assert!(pt.z.im.abs() < 1e-9);
        }
        // the anchor stays on the polyline and the ends expand
        assert!(arc.dist_to(&saddle.location) < 1e-9);
        assert!(arc.arclength() > 0.04 * 1.9f64.powi(3));

        // image of the current arc lands on the next generation's polyline
        let next = unstable_arc(&f, saddle, 0.02, 4).unwrap();
        for pt in arc.points.iter().step_by(64) {
            let img = f.step(*pt);
            assert!(next.dist_to(&img) < 1e-4);
        }
    }

    #[test]
    fn arc_rejects_resonance_and_higher_period() {
        let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
        let f = product_preset(&p, &Poly::from_real(&[0.0, 0.0, 1.0])).unwrap();
        let (phi, _) = golden();
        // fabricated anchor with matching base and fiber stretch
        let fake = SaddlePoint {
            location: Point2::new(Complex64::new(phi, 0.0), Complex64::new(phi, 0.0)),
            period: 1,
            base_multiplier: Complex64::new(2.0 * phi, 0.0),
            fiber_multiplier: Complex64::new(2.0 * phi, 0.0),
            component_index: 1,
        };
        assert!(matches!(
            unstable_arc(&f, &fake, 0.02, 2),
            Err(InvariantError::Resonance { .. })
        ));
        let two = SaddlePoint { period: 2, ..fake };
        assert!(matches!(
            unstable_arc(&f, &two, 0.02, 2),
            Err(InvariantError::Invalid(_))
        ));
    }
}
