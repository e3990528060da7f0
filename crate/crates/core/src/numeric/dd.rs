//! Double-double arithmetic.
//!
//! Orbit residuals near strongly repelling fixed points amplify rounding by
//! the accumulated multiplier, which puts plain f64 evaluation right at the
//! tolerance the parameter search has to certify. The searches evaluate those
//! residuals in double-double precision instead; ~32 significant digits is
//! far more than the amplification can eat.

/// An unevaluated sum `hi + lo` with `|lo|` at most half an ulp of `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn add_f64(self, rhs: f64) -> Dd {
        self.add(Dd::from(rhs))
    }

    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(Dd {
            hi: -rhs.hi,
            lo: -rhs.lo,
        })
    }

    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, rhs: f64) -> Dd {
        self.mul(Dd::from(rhs))
    }

    pub fn sqr(self) -> Dd {
        self.mul(self)
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q0 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q0));
        let q1 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        Dd::from(q0).add_f64(q1).add_f64(q2)
    }

    /// Requires a nonnegative argument; one Newton step on the f64 seed
    /// doubles its precision.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        let y = Dd::from(self.hi.sqrt());
        y.add(self.div(y).sub(y).mul_f64(0.5))
    }
}

/// Evaluates a real-coefficient polynomial (lowest degree first) at `x` by
/// Horner's rule in double-double precision.
pub fn dd_poly_eval(coeffs: &[f64], x: Dd) -> Dd {
    let mut acc = Dd::ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc.mul(x).add_f64(c);
    }
    acc
}
