//! Numerical laboratory for polynomial skew products `f(z, w) = (p(z), q(z, w))` on C^2.
//!
//! The crate is organized bottom-up:
//!
//! * [`numeric`] — complex polynomials, bivariate polynomials, outward-rounded
//!   interval arithmetic, and a compensated (double-double) evaluation kernel.
//! * [`dynamics`] — the skew product type, orbits, fiber compositions, and
//!   regularity of the extension to projective space.
//! * [`julia`] — escape-time grids, filled Julia sets of base and fibers,
//!   Green potentials, external rays, and point-cloud metrics.
//! * [`biquad`] — the real biquadratic family `p_{a,b}(z) = (z^2 + a)^2 + b`,
//!   its parameter-space curves, and construction of the perturbed
//!   skew-product instances studied by the crate.
//! * [`invariant`] — saddle sets, classification of critical fibers,
//!   postcritical and fiber-Julia sampling, accumulation-set estimators, and
//!   hyperbolicity probes.
//! * [`certify`] — interval-certified inequality checks with grid
//!   corroboration, combined into a machine-readable certificate.

pub mod biquad;
pub mod certify;
pub mod dynamics;
pub mod invariant;
pub mod julia;
pub mod numeric;

pub use num_complex::Complex64;
