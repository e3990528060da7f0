//! Polynomial skew products `f(z, w) = (p(z), q(z, w))` and their orbits.

use num_complex::Complex64;
use thiserror::Error;

use crate::numeric::{poly_roots, BiPoly, NumericError, Poly, RootSet};

/// Magnitude cap: once a coordinate passes this, the orbit is frozen there
/// and flagged as escaped instead of being iterated into overflow.
pub const ESCAPE_CAP: f64 = 1e10;

/// Coefficient-size floor below which the leading fiber coefficient counts
/// as vanished for the regularity check.
const REGULARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error)]
pub enum DynamicsError {
    #[error("base degree {base} does not match fiber w-degree {fiber}")]
    DegreeMismatch { base: usize, fiber: usize },
    #[error("base polynomial must be monic (leading coefficient {lead})")]
    NotMonic { lead: Complex64 },
    #[error("skew products need degree >= 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("fiber derivative vanishes identically over z = {z}")]
    DegenerateFiber { z: Complex64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// A point of C^2 written as (base, fiber).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub z: Complex64,
    pub w: Complex64,
}

impl Point2 {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        Point2 { z, w }
    }

    pub fn dist(&self, other: &Point2) -> f64 {
        ((self.z - other.z).norm_sqr() + (self.w - other.w).norm_sqr()).sqrt()
    }
}

/// Outcome of the projective regularity test (extension of `f` to P^2).
///
/// For a monic base the top homogeneous parts share a projective zero only
/// at `[0 : 1 : 0]`, so the check reduces to the pure `w^d` coefficient of
/// the fiber's top part; its size relative to that part is the margin.
#[derive(Debug, Clone, Copy)]
pub struct RegularityCheck {
    pub is_regular: bool,
    pub margin: f64,
}

/// Polynomial skew product with monic base of the same degree as the fiber.
#[derive(Debug, Clone)]
pub struct SkewProduct {
    base: Poly,
    fiber: BiPoly,
    degree: usize,
    base_escape_radius: f64,
    fiber_escape_radius: f64,
    regularity: RegularityCheck,
}

impl SkewProduct {
    /// Validates degrees and monicity, fixes default escape radii, and runs
    /// the regularity check once.
    pub fn new(base: Poly, fiber: BiPoly) -> Result<Self, DynamicsError> {
        let d = base.degree();
        if d < 2 {
            return Err(DynamicsError::DegreeTooSmall(d));
        }
        if fiber.deg_w() != d {
            return Err(DynamicsError::DegreeMismatch {
                base: d,
                fiber: fiber.deg_w(),
            });
        }
        if !base.is_monic(1e-12) {
            return Err(DynamicsError::NotMonic {
                lead: base.leading(),
            });
        }
        let base_escape_radius = 1.0 + base.coeff_scale();
        // Generic fiber bound: with |z| at the base radius, |w| beyond this
        // dominates every lower-order term.
        let b = base_escape_radius;
        let mut low = 0.0f64;
        for k in 0..fiber.deg_w() {
            let mut col = 0.0f64;
            for j in 0..=fiber.deg_z() {
                col += fiber.coeff(j, k).norm() * b.powi(j as i32);
            }
            low += col;
        }
        let fiber_escape_radius = (1.0 + low).max(2.0);
        let regularity = regularity_check(&fiber);
        Ok(SkewProduct {
            base,
            fiber,
            degree: d,
            base_escape_radius,
            fiber_escape_radius,
            regularity,
        })
    }

    /// Overrides the fiber escape radius with a family-specific bound.
    pub fn with_fiber_escape_radius(mut self, r: f64) -> Self {
        assert!(r.is_finite() && r > 0.0);
        self.fiber_escape_radius = r;
        self
    }

    /// Overrides the base escape radius.
    pub fn with_base_escape_radius(mut self, r: f64) -> Self {
        assert!(r.is_finite() && r > 0.0);
        self.base_escape_radius = r;
        self
    }

    pub fn base(&self) -> &Poly {
        &self.base
    }

    pub fn fiber(&self) -> &BiPoly {
        &self.fiber
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base_escape_radius(&self) -> f64 {
        self.base_escape_radius
    }

    pub fn fiber_escape_radius(&self) -> f64 {
        self.fiber_escape_radius
    }

    pub fn regularity(&self) -> RegularityCheck {
        self.regularity
    }

    /// One application of the map. Once a coordinate magnitude exceeds
    /// [`ESCAPE_CAP`], the point is returned unchanged.
    pub fn step(&self, pt: Point2) -> Point2 {
        if pt.z.norm() > ESCAPE_CAP || pt.w.norm() > ESCAPE_CAP {
            return pt;
        }
        Point2 {
            z: self.base.eval(pt.z),
            w: self.fiber.eval(pt.z, pt.w),
        }
    }
}

/// Orbit record with escape bookkeeping.
///
/// `points[k]` is `f^k` of the start; at most `window` trailing points are
/// retained (`skipped` counts truncated leading entries). Escape indices
/// refer to the first iterate whose coordinate left the respective radius.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub points: Vec<Point2>,
    pub skipped: usize,
    pub escaped_at: Option<usize>,
    pub base_escaped_at: Option<usize>,
}

/// Default orbit window length.
pub const ORBIT_WINDOW: usize = 4096;

/// Iterates `f` for `n` steps from `start`, recording the orbit.
pub fn iterate(f: &SkewProduct, start: Point2, n: usize) -> Orbit {
    iterate_windowed(f, start, n, ORBIT_WINDOW)
}

/// As [`iterate`], keeping only the last `window` points.
pub fn iterate_windowed(f: &SkewProduct, start: Point2, n: usize, window: usize) -> Orbit {
    assert!(window > 0);
    let mut points = Vec::with_capacity(window.min(n + 1));
    let mut skipped = 0usize;
    let mut escaped_at = None;
    let mut base_escaped_at = None;
    let mut pt = start;
    for k in 0..=n {
        if base_escaped_at.is_none() && pt.z.norm() > f.base_escape_radius {
            base_escaped_at = Some(k);
        }
        if escaped_at.is_none() && pt.w.norm() > f.fiber_escape_radius {
            escaped_at = Some(k);
        }
        if points.len() == window {
            points.remove(0);
            skipped += 1;
        }
        points.push(pt);
        if k < n {
            pt = f.step(pt);
        }
    }
    Orbit {
        points,
        skipped,
        escaped_at,
        base_escaped_at,
    }
}

/// The fiberwise composition `Q_z^k(w)`: the w-coordinate of `f^k(z, w)`.
pub fn fiber_composition(f: &SkewProduct, z: Complex64, w: Complex64, k: usize) -> Complex64 {
    let mut pt = Point2::new(z, w);
    for _ in 0..k {
        pt = f.step(pt);
    }
    pt.w
}

/// Critical points of the fiber map over a frozen base point: the roots of
/// `w -> dq/dw(z, w)` with multiplicities.
pub fn critical_points_over(
    f: &SkewProduct,
    z: Complex64,
    tol: f64,
) -> Result<RootSet, DynamicsError> {
    let deriv = f.fiber.partial_w().fiber_poly(z);
    let scale = 1.0 + f.fiber.coeff_scale();
    if deriv.coeffs().iter().all(|c| c.norm() <= 1e-14 * scale) {
        return Err(DynamicsError::DegenerateFiber { z });
    }
    Ok(poly_roots(&deriv, tol)?)
}

/// Whether `f` extends holomorphically to the projective plane, with the
/// size of the controlling coefficient as margin.
pub fn is_regular(f: &SkewProduct) -> RegularityCheck {
    f.regularity
}

fn regularity_check(fiber: &BiPoly) -> RegularityCheck {
    let top = fiber.top_homogeneous();
    let max_top = top
        .iter()
        .map(|&(_, _, c)| c.norm())
        .fold(0.0f64, f64::max);
    let pure_w = top
        .iter()
        .find(|&&(j, _, _)| j == 0)
        .map(|&(_, _, c)| c.norm())
        .unwrap_or(0.0);
    let margin = if max_top > 0.0 { pure_w / max_top } else { 0.0 };
    RegularityCheck {
        is_regular: fiber.deg_total() == fiber.deg_w() && margin > REGULARITY_TOL,
        margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// The degree-4 fiber q(z, w) = w^4 + 4 (2 - z) over a given base.
    fn quartic_family(base: Poly) -> SkewProduct {
        let fiber = BiPoly::new(vec![
            vec![c(8.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(-4.0, 0.0)],
        ]);
        SkewProduct::new(base, fiber)
            .unwrap()
            .with_fiber_escape_radius(2.5)
    }

    fn chebyshev_square() -> Poly {
        Poly::from_real(&[2.0, 0.0, -4.0, 0.0, 1.0])
    }

    #[test]
    fn coordinates_split() {
        let f = quartic_family(chebyshev_square());
        let pt = Point2::new(c(0.3, 0.1), c(-0.2, 0.4));
        let img = f.step(pt);
        assert!((img.z - f.base().eval(pt.z)).norm() < 1e-14);
        assert!((img.w - f.fiber().eval(pt.z, pt.w)).norm() < 1e-14);
    }

    #[test]
    fn semigroup_before_escape() {
        let f = quartic_family(chebyshev_square());
        let pt = Point2::new(c(0.2, 0.05), c(0.1, -0.1));
        let o = iterate(&f, pt, 5);
        let two_then_three = {
            let mid = o.points[2];
            iterate(&f, mid, 3).points[3]
        };
        assert!(two_then_three.dist(&o.points[5]) < 1e-9);
    }

    #[test]
    fn escape_flags_and_cap() {
        let f = quartic_family(chebyshev_square());
        let o = iterate(&f, Point2::new(c(3.0, 0.0), c(3.0, 0.0)), 12);
        // Base radius defaults to 1 + sum |coeffs| = 8: flagged after one step.
        assert_eq!(o.base_escaped_at, Some(1));
        assert_eq!(o.escaped_at, Some(0));
        for p in &o.points {
            assert!(p.z.norm().is_finite() && p.w.norm().is_finite());
        }
        // Frozen once past the cap.
        let last = o.points[o.points.len() - 1];
        let more = f.step(last);
        assert_eq!(more, last);
    }

    #[test]
    fn window_truncates_head() {
        let f = quartic_family(chebyshev_square());
        let o = iterate_windowed(&f, Point2::new(c(0.0, 0.0), c(0.0, 0.0)), 10, 4);
        assert_eq!(o.points.len(), 4);
        assert_eq!(o.skipped, 7);
    }

    #[test]
    fn fiber_composition_matches_iterate() {
        let f = quartic_family(chebyshev_square());
        let z = c(0.4, 0.02);
        let w = c(0.2, -0.3);
        let o = iterate(&f, Point2::new(z, w), 3);
        let via = fiber_composition(&f, z, w, 3);
        assert!((via - o.points[3].w).norm() < 1e-12);
        assert_eq!(fiber_composition(&f, z, w, 0), w);
    }

    #[test]
    fn quartic_fiber_critical_points() {
        let f = quartic_family(chebyshev_square());
        let roots = critical_points_over(&f, c(1.0, 0.0), 1e-12).unwrap();
        // dq/dw = 4 w^3: a triple zero independent of z.
        assert_eq!(roots.roots.len(), 1);
        assert_eq!(roots.roots[0].1, 3);
        assert!(roots.roots[0].0.norm() < 1e-12);
    }

    #[test]
    fn product_fiber_critical_points() {
        // q(z, w) = w^2 - 1 over z^2 - 1.
        let base = Poly::from_real(&[-1.0, 0.0, 1.0]);
        let fiber = BiPoly::from_w_poly(&Poly::from_real(&[-1.0, 0.0, 1.0]));
        let f = SkewProduct::new(base, fiber).unwrap();
        let roots = critical_points_over(&f, c(0.7, 0.3), 1e-12).unwrap();
        assert_eq!(roots.roots.len(), 1);
        assert!(roots.roots[0].0.norm() < 1e-12);
    }

    #[test]
    fn regularity_of_family_and_counterexample() {
        let f = quartic_family(chebyshev_square());
        assert!(is_regular(&f).is_regular);
        assert!((is_regular(&f).margin - 1.0).abs() < 1e-12);
        // q(z, w) = w^2 + z w^... with the pure w^2 term replaced by z w:
        // top part z w has no pure w^2 coefficient, so the extension fails.
        let base = Poly::from_real(&[-1.0, 0.0, 1.0]);
        let fiber = BiPoly::new(vec![
            vec![c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        let g = SkewProduct::new(base.clone(), fiber);
        // deg_w = 1 != 2 already fails construction.
        assert!(matches!(g, Err(DynamicsError::DegreeMismatch { .. })));
        // Same w-degree but leading fiber coefficient carried by z:
        // q = z w^2 + w. Total degree 3 > deg_w, irregular.
        let fiber = BiPoly::new(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        let g = SkewProduct::new(base, fiber).unwrap();
        assert!(!is_regular(&g).is_regular);
    }

    #[test]
    fn degree_and_monic_validation() {
        let base = Poly::from_real(&[0.0, 1.0]);
        let fiber = BiPoly::from_w_poly(&Poly::from_real(&[0.0, 0.0, 1.0]));
        assert!(matches!(
            SkewProduct::new(base, fiber.clone()),
            Err(DynamicsError::DegreeTooSmall(1))
        ));
        let base = Poly::from_real(&[-1.0, 0.0, 2.0]);
        assert!(matches!(
            SkewProduct::new(base, fiber),
            Err(DynamicsError::NotMonic { .. })
        ));
    }

    #[test]
    fn escape_growth_on_family_boundary() {
        // |q_z(w)| >= 7 |w| on |w| = 5/2 whenever |2 - z| <= 5.
        let f = quartic_family(chebyshev_square());
        for i in 0..100 {
            for j in 0..100 {
                let az = 2.0 * std::f64::consts::PI * (i as f64) / 100.0;
                let aw = 2.0 * std::f64::consts::PI * (j as f64) / 100.0;
                let radius = 5.0 * (((i % 8) as f64) / 7.0).min(1.0);
                let z = c(2.0, 0.0) + Complex64::from_polar(radius, az);
                let w = Complex64::from_polar(2.5, aw);
                let img = f.fiber().eval(z, w);
                assert!(
                    img.norm() >= 7.0 * w.norm() - 1e-9,
                    "z={z} w={w} |q|={}",
                    img.norm()
                );
            }
        }
    }
}
