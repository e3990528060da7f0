//! Ready-made skew products: plain product maps and the tower family whose
//! fiber interpolates between a pure power map and an iterated quadratic
//! across the base plane.

use num_complex::Complex64;

use super::BiquadError;
use crate::dynamics::SkewProduct;
use crate::numeric::{BiPoly, Poly};

/// Largest tower exponent accepted; degrees grow as `2^n` and the
/// polynomial algebra beyond this stops being worth the memory.
const TOWER_CAP: usize = 12;

/// Product map `(p(z), q(w))` as a skew product with a z-independent fiber.
pub fn product_preset(p: &Poly, qw: &Poly) -> Result<SkewProduct, BiquadError> {
    Ok(SkewProduct::new(p.clone(), BiPoly::from_w_poly(qw))?)
}

/// The interpolating tower family. The base is the n-fold iterate of
/// `z^2 - R`, and the fiber
/// `q(z, w) = w^{2^n} + ((z + sqrt R) / (2 sqrt R)) t(w)` blends the power
/// map at `z = -sqrt R` into the full quadratic iterate at `z = sqrt R`,
/// where `t(w) = h^n(w) - w^{2^n}` and `h(w) = (w - eps)^2 - 1 + eps`.
pub fn sumi_preset(big_r: f64, eps: f64, n: usize) -> Result<SkewProduct, BiquadError> {
    if !(big_r > 0.0) || !big_r.is_finite() {
        return Err(BiquadError::Range(format!(
            "R must be positive and finite, got {big_r}"
        )));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(BiquadError::Range(format!(
            "eps must be nonnegative and finite, got {eps}"
        )));
    }
    if n == 0 || n > TOWER_CAP {
        return Err(BiquadError::Range(format!(
            "tower exponent n = {n} outside 1..={TOWER_CAP}"
        )));
    }
    let deg = 1usize << n;
    let base = Poly::from_real(&[-big_r, 0.0, 1.0]).iterate_compose(n);

    // h^n is monic of degree 2^n, so subtracting the pure power cancels the
    // leading term exactly and t carries only the lower-order part.
    let h = Poly::from_real(&[eps * eps + eps - 1.0, -2.0 * eps, 1.0]);
    let mut t: Vec<Complex64> = h.iterate_compose(n).coeffs().to_vec();
    t[deg] -= Complex64::new(1.0, 0.0);

    let half = Complex64::new(0.5, 0.0);
    let slope = Complex64::new(1.0 / (2.0 * big_r.sqrt()), 0.0);
    let mut row0: Vec<Complex64> = t.iter().map(|&c| half * c).collect();
    row0[deg] += Complex64::new(1.0, 0.0);
    let row1: Vec<Complex64> = t.iter().map(|&c| slope * c).collect();

    Ok(SkewProduct::new(base, BiPoly::new(vec![row0, row1]))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DynamicsError;

    #[test]
    fn product_of_two_quadratics() {
        let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
        let f = product_preset(&p, &Poly::from_real(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(f.fiber().deg_z(), 0);
        assert!(f.regularity().is_regular);

        assert!(product_preset(&p, &Poly::from_real(&[-1.0, 0.0, 1.0])).is_ok());

        let cubic = Poly::from_real(&[0.0, 0.0, 0.0, 1.0]);
        match product_preset(&p, &cubic) {
            Err(BiquadError::Dynamics(DynamicsError::DegreeMismatch { .. })) => {}
            other => panic!("expected degree mismatch, got {other:?}"),
        }
    }

    #[test]
    fn tower_family_shapes() {
        let f = sumi_preset(4.0, 0.0, 1).unwrap();
        let b = f.base().coeffs();
        assert_eq!(b.len(), 3);
        assert!((b[0] - Complex64::new(-4.0, 0.0)).norm() < 1e-12);
        assert!((b[2] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // q(z, w) = w^2 - (z + 2) / 4
        let q = f.fiber();
        assert_eq!(q.deg_w(), 2);
        assert!((q.coeff(0, 0) - Complex64::new(-0.5, 0.0)).norm() < 1e-12);
        assert!((q.coeff(1, 0) - Complex64::new(-0.25, 0.0)).norm() < 1e-12);
        assert!((q.coeff(0, 2) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((q.coeff(0, 1)).norm() < 1e-12);

        let f2 = sumi_preset(3.0, 0.1, 2).unwrap();
        assert_eq!(f2.fiber().deg_w(), 4);
        assert_eq!(f2.base().degree(), 4);
        // base is the second iterate of z^2 - R
        let z = Complex64::new(0.7, -0.3);
        let pr = z * z - 3.0;
        assert!((f2.base().eval(z) - (pr * pr - 3.0)).norm() < 1e-12);
        // at z = -sqrt R the fiber is the pure power, at z = sqrt R the full iterate
        let r = 3.0f64.sqrt();
        let w = Complex64::new(0.4, 0.2);
        assert!((f2.fiber().eval(Complex64::new(-r, 0.0), w) - w.powi(4)).norm() < 1e-12);
        let h = |w: Complex64| {
            let s = w - 0.1;
            s * s - 1.0 + 0.1
        };
        assert!((f2.fiber().eval(Complex64::new(r, 0.0), w) - h(h(w))).norm() < 1e-12);
    }

    #[test]
    fn tower_family_rejects_bad_inputs() {
        assert!(matches!(sumi_preset(0.0, 0.0, 1), Err(BiquadError::Range(_))));
        assert!(matches!(sumi_preset(4.0, -0.1, 1), Err(BiquadError::Range(_))));
        assert!(matches!(sumi_preset(4.0, 0.0, 0), Err(BiquadError::Range(_))));
        assert!(matches!(sumi_preset(4.0, 0.0, 13), Err(BiquadError::Range(_))));
    }
}
