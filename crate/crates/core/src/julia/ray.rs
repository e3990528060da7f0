//! Green's function samples and external ray traces for monic polynomials.

use super::JuliaError;
use crate::numeric::Poly;
use num_complex::Complex64;
use num_rational::Ratio;

/// Potential of a single point. Zero exactly when the orbit stayed bounded
/// through `maxiter`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenSample {
    pub z: Complex64,
    pub g: f64,
}

/// Escape-rate potential log|p^n(z)| / d^n. The orbit is pushed well past
/// the escape radius before reading off the logarithm; every extra step
/// divides the truncation error by the degree, so the loop continues until
/// the next step would overflow.
pub fn green_potential(p: &Poly, z: Complex64, maxiter: u32, radius: f64) -> GreenSample {
    let d = p.degree() as f64;
    let threshold = radius.max(1e6);
    let cap = 10f64.powf(300.0 / d);
    let mut v = z;
    let mut n = 0u32;
    let mut escaped = false;
    for k in 0..=maxiter {
        if v.norm() > threshold {
            n = k;
            escaped = true;
            break;
        }
        if k < maxiter {
            v = p.eval(v);
        }
    }
    if !escaped {
        return GreenSample { z, g: 0.0 };
    }
    for _ in 0..64 {
        if v.norm() >= cap {
            break;
        }
        v = p.eval(v);
        n += 1;
    }
    GreenSample {
        z,
        g: v.norm().ln() * d.powi(-(n as i32)),
    }
}

/// External ray sampled at geometrically decreasing potentials.
#[derive(Debug, Clone)]
pub struct ExternalRayTrace {
    pub theta: Ratio<u64>,
    /// Ray points ordered by decreasing potential.
    pub points: Vec<Complex64>,
    pub potentials: Vec<f64>,
    pub landing: Option<Complex64>,
    pub landed: bool,
}

const RAY_TOP_POTENTIAL: f64 = 18.420680743952367; // ln 1e8
const LANDING_WINDOW: usize = 8;
const LANDING_TOL: f64 = 1e-6;

/// Traces the ray at rational angle `theta` from potential ln 1e8 down by a
/// factor of the degree per level, for `depth` levels.
///
/// The descent works by single-step pullback along the whole forward angle
/// orbit: with theta_j the angle orbit under multiplication by the degree,
/// the level-k point of R(theta_j) solves p(y) = level-(k-1) point of
/// R(theta_{j+1}), Newton-seeded at the previous level of the same ray with
/// its modulus rescaled to the target potential. Only the first `depth`
/// angles can influence the output, so the working set stays small for any
/// admissible denominator. Pulling back is contracting toward the Julia set,
/// which keeps the trace stable at depths where re-solving against deep
/// compositions of p overflows. A stalled Newton solve (a precritical point
/// on the ray) aborts with the last good potential.
pub fn trace_external_ray(
    p: &Poly,
    theta: Ratio<u64>,
    depth: u32,
) -> Result<ExternalRayTrace, JuliaError> {
    if p.degree() < 2 {
        return Err(JuliaError::Invalid("ray needs degree at least 2".into()));
    }
    if !p.is_monic(1e-12) {
        return Err(JuliaError::Invalid("ray tracing needs a monic polynomial".into()));
    }
    if *theta.denom() > 1u64 << 32 {
        return Err(JuliaError::Invalid("angle denominator above 2^32".into()));
    }
    if depth > 256 {
        return Err(JuliaError::Invalid("ray depth capped at 256".into()));
    }
    let d = p.degree() as u64;
    let den = *theta.denom();
    let start = *theta.numer() % den;

    // Level-0 points for every angle the descent can touch.
    let mut num = start;
    let mut row: Vec<Complex64> = (0..=depth)
        .map(|_| {
            let ang = 2.0 * std::f64::consts::PI * (num as f64 / den as f64);
            let pt = RAY_TOP_POTENTIAL.exp() * Complex64::cis(ang);
            num = (num * d) % den;
            pt
        })
        .collect();

    let mut points = vec![row[0]];
    let mut potentials = vec![RAY_TOP_POTENTIAL];

    for k in 1..=depth {
        let g_prev = RAY_TOP_POTENTIAL * (d as f64).powi(-(k as i32 - 1));
        let g_here = g_prev / d as f64;
        let rescale = (g_here - g_prev).exp();
        let mut next = Vec::with_capacity(row.len() - 1);
        for j in 0..row.len() - 1 {
            let target = row[j + 1];
            let mut y = row[j] * rescale;
            let mut converged = false;
            for it in 0..40 {
                let (v, dv) = p.eval_with_derivative(y);
                if dv.norm() == 0.0 || !dv.is_finite() || !v.is_finite() {
                    break;
                }
                let step = (v - target) / dv;
                y -= step;
                if step.norm() <= 1e-14 * (1.0 + y.norm()) && it >= 1 {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(JuliaError::RayBlocked {
                    potential: g_prev,
                    partial: points,
                });
            }
            next.push(y);
        }
        row = next;
        points.push(row[0]);
        potentials.push(g_here);
    }

    let landed = points.len() >= LANDING_WINDOW && {
        let tail = &points[points.len() - LANDING_WINDOW..];
        let mut diam = 0.0f64;
        for i in 0..tail.len() {
            for j in i + 1..tail.len() {
                diam = diam.max((tail[i] - tail[j]).norm());
            }
        }
        diam < LANDING_TOL
    };
    let landing = landed.then(|| *points.last().unwrap());
    Ok(ExternalRayTrace {
        theta: Ratio::new(start, den),
        points,
        potentials,
        landing,
        landed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cheb() -> Poly {
        // (z^2 - 2)^2 - 2
        Poly::from_real(&[2.0, 0.0, -4.0, 0.0, 1.0])
    }

    #[test]
    fn quartic_potential_is_log_modulus() {
        let p = Poly::from_real(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        let g = green_potential(&p, Complex64::new(2.0, 0.0), 100, 2.0);
        assert!((g.g - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_potential_matches_closed_form() {
        // With z = u + 1/u the potential is ln u; at z = 3, u = (3+sqrt 5)/2.
        let expect = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        let g = green_potential(&cheb(), Complex64::new(3.0, 0.0), 100, 5.0);
        assert!((g.g - expect).abs() < 1e-9, "got {}", g.g);
        let inside = green_potential(&cheb(), Complex64::new(0.0, 0.0), 100, 5.0);
        assert_eq!(inside.g, 0.0);
    }

    #[test]
    fn potential_functional_equation() {
        let p = cheb();
        for i in 0..40 {
            let z = Complex64::new(2.2 + 0.1 * i as f64, 0.3 * ((i % 5) as f64 - 2.0));
            let gz = green_potential(&p, z, 200, 5.0).g;
            let gpz = green_potential(&p, p.eval(z), 200, 5.0).g;
            if gz > 0.0 {
                assert!((gpz - 4.0 * gz).abs() < 1e-6, "z = {z}");
            }
        }
    }

    #[test]
    fn straight_ray_of_pure_quartic() {
        let p = Poly::from_real(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        let trace = trace_external_ray(&p, Ratio::new(1u64, 8), 48).unwrap();
        let want = std::f64::consts::FRAC_PI_4;
        for z in &trace.points {
            assert!((z.arg() - want).abs() < 1e-8);
        }
        assert!(trace.landed);
        let landing = trace.landing.unwrap();
        assert!((landing - Complex64::cis(want)).norm() < 1e-6);
        for w in trace.potentials.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn zero_ray_of_chebyshev_lands_on_beta() {
        let trace = trace_external_ray(&cheb(), Ratio::new(0u64, 1), 48).unwrap();
        assert!(trace.landed);
        let landing = trace.landing.unwrap();
        assert!((landing - Complex64::new(2.0, 0.0)).norm() < 1e-6);
        for z in &trace.points {
            assert!(z.im.abs() < 1e-6 && z.re > 2.0 - 1e-9);
        }
    }

    #[test]
    fn quarter_ray_of_chebyshev_descends_the_imaginary_axis() {
        let trace = trace_external_ray(&cheb(), Ratio::new(1u64, 4), 40).unwrap();
        for z in &trace.points {
            assert!(z.re.abs() <= 1e-6 * (1.0 + z.norm()));
            assert!(z.im > -1e-9);
        }
        assert!(trace.landed);
        assert!(trace.landing.unwrap().norm() < 1e-6);
    }

    #[test]
    fn ray_equivariance_under_the_map() {
        let p = cheb();
        let theta = Ratio::new(3u64, 52);
        let a = trace_external_ray(&p, theta, 32).unwrap();
        let b = trace_external_ray(&p, theta * 4, 32).unwrap();
        for k in 1..a.points.len() {
            let mapped = p.eval(a.points[k]);
            let partner = b.points[k - 1];
            assert!(
                (mapped - partner).norm() <= 1e-4 * (1.0 + partner.norm()),
                "level {k}"
            );
        }
    }

    #[test]
    fn bad_angles_and_degrees_are_rejected() {
        let p = cheb();
        assert!(trace_external_ray(&p, Ratio::new(1u64, (1u64 << 32) + 2), 8).is_err());
        let linear = Poly::from_real(&[1.0, 1.0]);
        assert!(trace_external_ray(&linear, Ratio::new(1u64, 4), 8).is_err());
    }
}
