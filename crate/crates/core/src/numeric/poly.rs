//! Univariate complex polynomials with simultaneous root iteration.

use num_complex::Complex64;

use super::NumericError;

/// Residual target for [`poly_roots`] when the caller passes no tolerance.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Iteration budget for the simultaneous root iteration.
const ROOT_ITER_BUDGET: usize = 256;
/// Roots closer than `CLUSTER_FACTOR * tol` (times the root scale) are merged
/// into a single root with multiplicity.
const CLUSTER_FACTOR: f64 = 1e3;

/// Polynomial over C, coefficients stored lowest degree first.
///
/// The coefficient vector is trimmed so that the last entry is nonzero;
/// the zero polynomial is represented as a single zero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Builds a polynomial from coefficients `c_0 + c_1 z + ...`, trimming
    /// trailing (leading-degree) zeros.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Poly { coeffs }
    }

    /// Builds a polynomial with real coefficients, lowest degree first.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The monic product of `(z - r)` over the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Poly::new(vec![Complex64::new(1.0, 0.0)]);
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, Complex64::new(1.0, 0.0)]));
        }
        p
    }

    pub fn zero() -> Self {
        Poly::new(vec![])
    }

    /// Coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().expect("coefficients are never empty")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].norm() == 0.0
    }

    pub fn is_monic(&self, tol: f64) -> bool {
        (self.leading() - Complex64::new(1.0, 0.0)).norm() <= tol
    }

    /// True when every coefficient has imaginary part within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= tol)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Evaluates the polynomial and its derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            der = der * z + acc;
            acc = acc * z + c;
        }
        (acc, der)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i as f64 + 1.0))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, k: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Composition `self(other(z))` by Horner over polynomials.
    pub fn compose(&self, other: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Poly::new(vec![c]));
        }
        acc
    }

    /// The k-fold iterate of `self` as a polynomial.
    ///
    /// Degree grows as `d^k`; callers guard k.
    pub fn iterate_compose(&self, k: usize) -> Poly {
        let mut acc = Poly::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    /// Sum of coefficient magnitudes; the residual scale used by root finding.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// Roots of a polynomial with multiplicities from cluster merging.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<(Complex64, usize)>,
}

impl RootSet {
    /// Roots repeated by multiplicity.
    pub fn flattened(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for &(r, m) in &self.roots {
            out.extend(std::iter::repeat(r).take(m));
        }
        out
    }

    /// Distinct roots whose imaginary part is below `im_tol`, sorted by
    /// real part ascending.
    pub fn real_roots(&self, im_tol: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .roots
            .iter()
            .filter(|(r, _)| r.im.abs() <= im_tol)
            .map(|(r, _)| r.re)
            .collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|&(_, m)| m).sum()
    }
}

/// All complex roots of `p` by Aberth-style simultaneous iteration.
///
/// Exact zero roots (vanishing low-order coefficients) are stripped first.
/// The iteration is seeded on a perturbed circle of radius `1 + max |c_k|`
/// of the monic normalization and runs until every residual satisfies
/// `|p(root)| <= tol * (1 + sum |c_k|)`. Converged simple roots get a short
/// Newton polish; roots closer than `1e3 * tol` (relative to the root scale)
/// are merged into one root with multiplicity.
pub fn poly_roots(p: &Poly, tol: f64) -> Result<RootSet, NumericError> {
    if p.is_zero() {
        return Err(NumericError::Domain(
            "root finding on the zero polynomial".into(),
        ));
    }
    let mut roots: Vec<(Complex64, usize)> = Vec::new();

    // Exact roots at the origin.
    let mut coeffs = p.coeffs().to_vec();
    let zero_mult = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    if zero_mult > 0 {
        roots.push((Complex64::new(0.0, 0.0), zero_mult));
        coeffs.drain(..zero_mult);
    }

    let reduced = Poly::new(coeffs);
    let n = reduced.degree();
    if n == 0 {
        return Ok(RootSet { roots });
    }

    let lead = reduced.leading();
    let monic = reduced.scale(lead.inv());
    let scale = 1.0 + monic.coeff_scale();

    let mut ws = seeds(&monic);
    let deriv = monic.derivative();
    for _ in 0..ROOT_ITER_BUDGET {
        let mut residual = 0.0f64;
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (pv, dv) = (monic.eval(ws[i]), deriv.eval(ws[i]));
            residual = residual.max(pv.norm());
            if pv.norm() == 0.0 {
                continue;
            }
            let newton = if dv.norm() > 0.0 {
                pv / dv
            } else {
                // Derivative vanished exactly; nudge off the critical point.
                Complex64::new(1e-8, 1e-8)
            };
            let mut repel = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = ws[i] - ws[j];
                    if diff.norm() > 0.0 {
                        repel += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repel;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            ws[i] -= step;
            max_step = max_step.max(step.norm());
        }
        // Multiple roots meet the residual target while the cluster is still
        // wide (linear convergence); iterate on until the steps settle too.
        if residual <= tol * scale && max_step <= 10.0 * tol * scale {
            break;
        }
    }
    let residual = ws
        .iter()
        .map(|&w| monic.eval(w).norm())
        .fold(0.0f64, f64::max);
    if residual > tol * scale {
        return Err(NumericError::NonConvergence {
            iters: ROOT_ITER_BUDGET,
            residual,
        });
    }

    let root_scale = 1.0 + ws.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let merged = merge_clusters(&ws, CLUSTER_FACTOR * tol * root_scale);

    // Newton polish for simple roots; multiple roots keep the cluster mean.
    let mut out = Vec::with_capacity(merged.len());
    for (mut r, m) in merged {
        if m == 1 {
            for _ in 0..3 {
                let (pv, dv) = monic.eval_with_derivative(r);
                if dv.norm() > 0.0 {
                    r -= pv / dv;
                }
            }
        }
        out.push((r, m));
    }
    // Real polynomials have conjugate-symmetric roots, so an imaginary part
    // at the cluster scale is rounding noise. Kill it, or downstream orbits
    // through repelling real cycles blow the residue up into a fake escape.
    if p.is_real(1e-14 * scale) {
        for (r, _) in out.iter_mut() {
            if r.im != 0.0 && r.im.abs() <= CLUSTER_FACTOR * tol * root_scale {
                r.im = 0.0;
            }
        }
    }
    roots.extend(out);
    roots.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(RootSet { roots })
}

/// Seed points on a perturbed circle of radius `1 + max |c_k|`.
fn seeds(monic: &Poly) -> Vec<Complex64> {
    let n = monic.degree();
    let radius = 1.0
        + monic
            .coeffs()
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    (0..n)
        .map(|k| {
            let jitter = 0.553 + 0.37 * (k as f64) + 0.01 * (k as f64) * (k as f64);
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + jitter / (n as f64);
            let r = radius * (1.0 + 0.02 * ((k % 5) as f64 - 2.0) / 5.0);
            Complex64::from_polar(r, angle)
        })
        .collect()
}

/// Single-linkage clustering of approximate roots at radius `eps`.
fn merge_clusters(ws: &[Complex64], eps: f64) -> Vec<(Complex64, usize)> {
    let n = ws.len();
    let mut assigned = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut stack = vec![i];
        assigned[i] = id;
        let mut members = Vec::new();
        while let Some(k) = stack.pop() {
            members.push(k);
            for j in 0..n {
                if assigned[j] == usize::MAX && (ws[k] - ws[j]).norm() <= eps {
                    assigned[j] = id;
                    stack.push(j);
                }
            }
        }
        clusters.push(members);
    }
    clusters
        .into_iter()
        .map(|members| {
            let m = members.len();
            let mean = members.iter().map(|&i| ws[i]).sum::<Complex64>() / (m as f64);
            (mean, m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_biquadratic_fixed_points() {
        // (z^2 - 2)^2 - 2 expanded: z^4 - 4 z^2 + 2.
        let p = Poly::from_real(&[2.0, 0.0, -4.0, 0.0, 1.0]);
        assert_eq!(p.eval(c(0.0, 0.0)), c(2.0, 0.0));
        assert_eq!(p.eval(c(2.0, 0.0)), c(2.0, 0.0));
        // (z^2 + 1/4)^2 + 1/4 fixes 1/2.
        let q = Poly::from_real(&[0.3125, 0.0, 0.5, 0.0, 1.0]);
        assert!((q.eval(c(0.5, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_of_quartic() {
        let p = Poly::from_real(&[2.0, 0.0, -4.0, 0.0, 1.0]);
        let d = p.derivative();
        assert_eq!(d.coeffs(), Poly::from_real(&[0.0, -8.0, 0.0, 4.0]).coeffs());
        // p'(2) = 4*2*(4-2)*... = 16 for the Chebyshev-square parameters.
        assert!((d.eval(c(2.0, 0.0)) - c(16.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn triple_zero_root_of_pure_cubic() {
        // d/dw of w^4 is 4 w^3: a triple root at the origin, found exactly.
        let p = Poly::from_real(&[0.0, 0.0, 0.0, 4.0]);
        let rs = poly_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0], (c(0.0, 0.0), 3));
    }

    #[test]
    fn golden_ratio_roots() {
        let p = Poly::from_real(&[-1.0, -1.0, 1.0]);
        let rs = poly_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        let got = rs.real_roots(1e-9);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let psi = (1.0 - 5.0f64.sqrt()) / 2.0;
        assert_eq!(got.len(), 2);
        assert!((got[0] - psi).abs() < 1e-12);
        assert!((got[1] - phi).abs() < 1e-12);
    }

    #[test]
    fn double_root_is_merged() {
        // (z - 1)^2 (z - 3) = z^3 - 5 z^2 + 7 z - 3.
        let p = Poly::from_real(&[-3.0, 7.0, -5.0, 1.0]);
        let rs = poly_roots(&p, 1e-10).unwrap();
        assert_eq!(rs.total_multiplicity(), 3);
        let double = rs
            .roots
            .iter()
            .find(|&&(_, m)| m == 2)
            .expect("double root near 1");
        assert!((double.0 - c(1.0, 0.0)).norm() < 1e-5);
        let simple = rs.roots.iter().find(|&&(_, m)| m == 1).unwrap();
        assert!((simple.0 - c(3.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn compose_matches_pointwise() {
        let p = Poly::from_real(&[2.0, 0.0, -4.0, 0.0, 1.0]);
        let p2 = p.iterate_compose(2);
        assert_eq!(p2.degree(), 16);
        for k in 0..20 {
            let z = c(0.1 * k as f64 - 1.0, 0.05 * k as f64);
            let direct = p.eval(p.eval(z));
            let composed = p2.eval(z);
            assert!(
                (direct - composed).norm() <= 1e-9 * (1.0 + direct.norm()),
                "mismatch at {z}"
            );
        }
    }

    #[test]
    fn eval_with_derivative_consistent() {
        let p = Poly::from_real(&[1.0, -2.5, 0.0, 4.0, 1.0]);
        let d = p.derivative();
        let z = c(0.7, -0.3);
        let (v, dv) = p.eval_with_derivative(z);
        assert!((v - p.eval(z)).norm() < 1e-14);
        assert!((dv - d.eval(z)).norm() < 1e-14);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(poly_roots(&Poly::zero(), 1e-12).is_err());
    }
}
