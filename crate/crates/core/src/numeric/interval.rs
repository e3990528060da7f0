//! Closed real intervals with outward rounding slack.
//!
//! Rust exposes no portable directed rounding, so every operation widens its
//! result outward by a relative `4 * EPSILON` plus one ulp. That keeps
//! containment sound for the margin scales the certificate checks care about
//! while staying independent of the FPU rounding mode.

use super::NumericError;

/// A closed interval `[lo, hi]` of finite reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealInterval {
    lo: f64,
    hi: f64,
}

/// Relative outward slack applied per operation (split across both ends).
const SLACK: f64 = 2.0 * f64::EPSILON;

impl RealInterval {
    /// Builds `[lo, hi]`. Panics on NaN or inverted endpoints: those are
    /// programming errors, not data.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(
            lo.is_finite() && hi.is_finite() && lo <= hi,
            "invalid interval [{lo}, {hi}]"
        );
        RealInterval { lo, hi }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        RealInterval::new(x, x)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Magnitude bound `max |x|` over the interval.
    pub fn abs_bound(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    fn widened(lo: f64, hi: f64) -> Self {
        let lo = (lo - lo.abs() * SLACK).next_down();
        let hi = (hi + hi.abs() * SLACK).next_up();
        RealInterval::new(lo, hi)
    }

    pub fn add(self, rhs: Self) -> Self {
        Self::widened(self.lo + rhs.lo, self.hi + rhs.hi)
    }

    pub fn sub(self, rhs: Self) -> Self {
        Self::widened(self.lo - rhs.hi, self.hi - rhs.lo)
    }

    pub fn neg(self) -> Self {
        RealInterval::new(-self.hi, -self.lo)
    }

    pub fn mul(self, rhs: Self) -> Self {
        let products = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = products.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = products.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self::widened(lo, hi)
    }

    /// Division; errors when the divisor straddles zero.
    pub fn div(self, rhs: Self) -> Result<Self, NumericError> {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Err(NumericError::Domain(format!(
                "interval division by [{}, {}] containing zero",
                rhs.lo, rhs.hi
            )));
        }
        let quotients = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let lo = quotients.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = quotients.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self::widened(lo, hi))
    }

    /// Integer power with even/odd sign handling.
    pub fn powi(self, n: u32) -> Self {
        match n {
            0 => RealInterval::point(1.0),
            _ => {
                let odd = n % 2 == 1;
                let (lo, hi) = if odd || self.lo >= 0.0 {
                    (self.lo.powi(n as i32), self.hi.powi(n as i32))
                } else if self.hi <= 0.0 {
                    (self.hi.powi(n as i32), self.lo.powi(n as i32))
                } else {
                    (0.0, self.lo.abs().max(self.hi).powi(n as i32))
                };
                Self::widened(lo, hi)
            }
        }
    }

    /// Square root; errors when the interval is entirely negative. A lower
    /// endpoint slightly below zero is clamped.
    pub fn sqrt(self) -> Result<Self, NumericError> {
        if self.hi < 0.0 {
            return Err(NumericError::Domain(format!(
                "sqrt of negative interval [{}, {}]",
                self.lo, self.hi
            )));
        }
        let lo = self.lo.max(0.0).sqrt();
        let hi = self.hi.sqrt();
        Ok(Self::widened(lo.max(0.0), hi))
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            RealInterval::new(0.0, self.abs_bound())
        }
    }
}

impl std::ops::Add for RealInterval {
    type Output = RealInterval;
    fn add(self, rhs: Self) -> Self {
        RealInterval::add(self, rhs)
    }
}

impl std::ops::Sub for RealInterval {
    type Output = RealInterval;
    fn sub(self, rhs: Self) -> Self {
        RealInterval::sub(self, rhs)
    }
}

impl std::ops::Mul for RealInterval {
    type Output = RealInterval;
    fn mul(self, rhs: Self) -> Self {
        RealInterval::mul(self, rhs)
    }
}

impl std::ops::Neg for RealInterval {
    type Output = RealInterval;
    fn neg(self) -> Self {
        RealInterval::neg(self)
    }
}

impl std::fmt::Display for RealInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_widens_outward() {
        let s = RealInterval::point(2.0) + RealInterval::point(3.0);
        assert!(s.contains(5.0));
        assert!(s.width() <= 1e-14);
    }

    #[test]
    fn powi_straddling_zero() {
        let x = RealInterval::new(-3.0, 2.0);
        let sq = x.powi(2);
        assert!(sq.lo() <= 0.0 && sq.contains(9.0) && sq.contains(0.0));
        let cube = x.powi(3);
        assert!(cube.contains(-27.0) && cube.contains(8.0));
    }

    #[test]
    fn division_by_zero_straddle_rejected() {
        let x = RealInterval::point(1.0);
        assert!(x.div(RealInterval::new(-1.0, 1.0)).is_err());
        let ok = x.div(RealInterval::new(2.0, 4.0)).unwrap();
        assert!(ok.contains(0.25) && ok.contains(0.5));
    }

    #[test]
    fn sqrt_clamps_tiny_negative_lo() {
        let x = RealInterval::new(-1e-18, 4.0);
        let r = x.sqrt().unwrap();
        assert!(r.contains(0.0) && r.contains(2.0));
        assert!(RealInterval::new(-2.0, -1.0).sqrt().is_err());
    }

    #[test]
    fn escape_constant_chain_stays_below_bound() {
        // 64^3 * (delta + 4 eps / 63) evaluated with intervals for the
        // certificate's reference parameters stays below sqrt(6)/10.
        let pow = RealInterval::point(64.0).powi(3);
        let delta = RealInterval::point(9e-7);
        let eps = RealInterval::point(1e-9);
        let four = RealInterval::point(4.0);
        let sixty_three = RealInterval::point(63.0);
        let lhs = pow.mul(delta.add(four.mul(eps).div(sixty_three).unwrap()));
        let rhs = RealInterval::point(6.0).sqrt().unwrap().div(RealInterval::point(10.0)).unwrap();
        assert!(lhs.hi() < rhs.lo());
        assert!((lhs.hi() - 0.235946).abs() < 1e-4);
        assert!((rhs.lo() - 0.2449489742783178).abs() < 1e-12);
    }

    #[test]
    fn abs_of_straddling_interval() {
        let x = RealInterval::new(-3.0, 1.0);
        let a = x.abs();
        assert_eq!(a.lo(), 0.0);
        assert_eq!(a.hi(), 3.0);
    }
}
