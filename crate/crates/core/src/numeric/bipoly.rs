//! Bivariate polynomials `q(z, w)` for skew-product fibers.

use num_complex::Complex64;

use super::Poly;

/// Polynomial in two variables, coefficients indexed `[z_power][w_power]`.
///
/// The row count fixes the z-degree bound and every row has the same width
/// `deg_w + 1`; at least one coefficient of w-degree `deg_w` is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    coeffs: Vec<Vec<Complex64>>,
    deg_w: usize,
}

impl BiPoly {
    /// Builds from rows `coeffs[j][k] z^j w^k`, trimming empty trailing
    /// columns and rows.
    pub fn new(rows: Vec<Vec<Complex64>>) -> Self {
        let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
        let mut coeffs: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|mut r| {
                r.resize(width, Complex64::new(0.0, 0.0));
                r
            })
            .collect();
        if coeffs.is_empty() {
            coeffs.push(vec![Complex64::new(0.0, 0.0)]);
        }
        // Trim zero columns from the top w-degree down, then zero rows.
        let mut deg_w = width.saturating_sub(1);
        while deg_w > 0 && coeffs.iter().all(|r| r[deg_w].norm() == 0.0) {
            for r in coeffs.iter_mut() {
                r.pop();
            }
            deg_w -= 1;
        }
        while coeffs.len() > 1 && coeffs.last().unwrap().iter().all(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        BiPoly { coeffs, deg_w }
    }

    /// A fiber polynomial independent of z.
    pub fn from_w_poly(q: &Poly) -> Self {
        BiPoly::new(vec![q.coeffs().to_vec()])
    }

    /// Degree in w.
    pub fn deg_w(&self) -> usize {
        self.deg_w
    }

    /// Degree in z.
    pub fn deg_z(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Total degree `max (j + k)` over nonzero coefficients.
    pub fn deg_total(&self) -> usize {
        let mut d = 0;
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if c.norm() != 0.0 {
                    d = d.max(j + k);
                }
            }
        }
        d
    }

    pub fn coeff(&self, z_pow: usize, w_pow: usize) -> Complex64 {
        self.coeffs
            .get(z_pow)
            .and_then(|r| r.get(w_pow))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// The univariate polynomial `w -> q(z, w)` for a frozen base point.
    pub fn fiber_poly(&self, z: Complex64) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.deg_w + 1];
        for (k, slot) in out.iter_mut().enumerate() {
            // Horner in z over the column k.
            let mut acc = Complex64::new(0.0, 0.0);
            for row in self.coeffs.iter().rev() {
                acc = acc * z + row[k];
            }
            *slot = acc;
        }
        Poly::new(out)
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        // Horner in w with z-collapsed column coefficients.
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..=self.deg_w).rev() {
            let mut col = Complex64::new(0.0, 0.0);
            for row in self.coeffs.iter().rev() {
                col = col * z + row[k];
            }
            acc = acc * w + col;
        }
        acc
    }

    /// Partial derivative in w.
    pub fn partial_w(&self) -> BiPoly {
        let rows = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &c)| c * (k as f64))
                    .collect()
            })
            .collect();
        BiPoly::new(rows)
    }

    /// Partial derivative in z.
    pub fn partial_z(&self) -> BiPoly {
        let rows = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, row)| row.iter().map(|&c| c * (j as f64)).collect())
            .collect();
        BiPoly::new(rows)
    }

    /// Coefficients of the top total-degree homogeneous part, listed as
    /// `(z_power, w_power, coefficient)`.
    pub fn top_homogeneous(&self) -> Vec<(usize, usize, Complex64)> {
        let d = self.deg_total();
        let mut out = Vec::new();
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, &c) in row.iter().enumerate() {
                if j + k == d && c.norm() != 0.0 {
                    out.push((j, k, c));
                }
            }
        }
        out
    }

    /// Sum of coefficient magnitudes.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|r| r.iter())
            .map(|c| c.norm())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// q(z, w) = w^4 + 4 (2 - z) = w^4 + 8 - 4 z.
    fn quartic_fiber() -> BiPoly {
        BiPoly::new(vec![
            vec![c(8.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(-4.0, 0.0)],
        ])
    }

    #[test]
    fn eval_and_fiber_poly_agree() {
        let q = quartic_fiber();
        assert_eq!(q.deg_w(), 4);
        assert_eq!(q.deg_z(), 1);
        let z = c(1.5, -0.25);
        let w = c(0.3, 0.8);
        let direct = q.eval(z, w);
        let via_fiber = q.fiber_poly(z).eval(w);
        assert!((direct - via_fiber).norm() < 1e-13);
        let expected = w.powu(4) + c(4.0, 0.0) * (c(2.0, 0.0) - z);
        assert!((direct - expected).norm() < 1e-13);
    }

    #[test]
    fn partial_derivatives() {
        let q = quartic_fiber();
        let qw = q.partial_w();
        // d/dw = 4 w^3, independent of z.
        assert_eq!(qw.deg_w(), 3);
        assert_eq!(qw.deg_z(), 0);
        assert!((qw.eval(c(7.0, 0.0), c(2.0, 0.0)) - c(32.0, 0.0)).norm() < 1e-13);
        let qz = q.partial_z();
        assert!((qz.eval(c(0.0, 0.0), c(5.0, 0.0)) - c(-4.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn top_homogeneous_part() {
        let q = quartic_fiber();
        let top = q.top_homogeneous();
        assert_eq!(top, vec![(0, 4, c(1.0, 0.0))]);
        assert_eq!(q.deg_total(), 4);
    }

    #[test]
    fn trims_padding() {
        let q = BiPoly::new(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert_eq!(q.deg_w(), 0);
        assert_eq!(q.deg_z(), 0);
    }
}
