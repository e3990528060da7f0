//! Escape-time grids for base and fiber filled Julia sets.

use super::JuliaError;
use crate::dynamics::{SkewProduct, ESCAPE_CAP};
use crate::numeric::{poly_roots, Poly, DEFAULT_ROOT_TOL};
use num_complex::Complex64;
use rayon::prelude::*;

/// Marker for a pixel whose orbit stayed inside the escape radius.
pub const BOUNDED: u32 = u32::MAX;

/// Rectangular pixel grid in the plane. Pixel (0,0) sits at the lower left
/// corner; `point` returns pixel centers.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub center: Complex64,
    pub half_width: f64,
    pub half_height: f64,
    pub nx: u32,
    pub ny: u32,
}

impl GridSpec {
    pub fn new(
        center: Complex64,
        half_width: f64,
        half_height: f64,
        nx: u32,
        ny: u32,
    ) -> Result<Self, JuliaError> {
        if !(half_width > 0.0 && half_height > 0.0)
            || !half_width.is_finite()
            || !half_height.is_finite()
            || !center.is_finite()
        {
            return Err(JuliaError::Invalid("grid extents must be positive".into()));
        }
        if nx < 2 || ny < 2 {
            return Err(JuliaError::Invalid("grid needs at least 2x2 pixels".into()));
        }
        Ok(GridSpec {
            center,
            half_width,
            half_height,
            nx,
            ny,
        })
    }

    pub fn square(center: Complex64, half: f64, n: u32) -> Result<Self, JuliaError> {
        GridSpec::new(center, half, half, n, n)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.half_height / self.ny as f64
    }

    pub fn pixel_diag(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    pub fn point(&self, ix: u32, iy: u32) -> Complex64 {
        Complex64::new(
            self.center.re - self.half_width + (ix as f64 + 0.5) * self.dx(),
            self.center.im - self.half_height + (iy as f64 + 0.5) * self.dy(),
        )
    }

    pub fn len(&self) -> usize {
        self.nx as usize * self.ny as usize
    }
}

/// Escape iteration counts over a grid. A count k means the orbit left the
/// escape radius after exactly k applications of the map; `BOUNDED` means it
/// stayed inside through `maxiter` applications.
#[derive(Debug, Clone)]
pub struct EscapeGrid {
    pub spec: GridSpec,
    pub iters: Vec<u32>,
    pub maxiter: u32,
    pub radius: f64,
}

impl EscapeGrid {
    fn idx(&self, ix: u32, iy: u32) -> usize {
        iy as usize * self.spec.nx as usize + ix as usize
    }

    pub fn count(&self, ix: u32, iy: u32) -> u32 {
        self.iters[self.idx(ix, iy)]
    }

    pub fn is_bounded(&self, ix: u32, iy: u32) -> bool {
        self.count(ix, iy) == BOUNDED
    }

    pub fn bounded_count(&self) -> usize {
        self.iters.iter().filter(|&&c| c == BOUNDED).count()
    }

    /// Centers of all bounded pixels.
    pub fn bounded_points(&self) -> Vec<Complex64> {
        let mut pts = Vec::new();
        for iy in 0..self.spec.ny {
            for ix in 0..self.spec.nx {
                if self.is_bounded(ix, iy) {
                    pts.push(self.spec.point(ix, iy));
                }
            }
        }
        pts
    }

    /// Axis-aligned hull of pixels selected by their count, grown by half a
    /// pixel in each direction so the true selected region is covered.
    /// Returns (re_min, re_max, im_min, im_max).
    pub fn hull_of(&self, keep: impl Fn(u32) -> bool) -> Option<[f64; 4]> {
        let mut hull: Option<[f64; 4]> = None;
        for iy in 0..self.spec.ny {
            for ix in 0..self.spec.nx {
                if keep(self.count(ix, iy)) {
                    let c = self.spec.point(ix, iy);
                    let h = hull.get_or_insert([c.re, c.re, c.im, c.im]);
                    h[0] = h[0].min(c.re);
                    h[1] = h[1].max(c.re);
                    h[2] = h[2].min(c.im);
                    h[3] = h[3].max(c.im);
                }
            }
        }
        hull.map(|h| {
            [
                h[0] - 0.5 * self.spec.dx(),
                h[1] + 0.5 * self.spec.dx(),
                h[2] - 0.5 * self.spec.dy(),
                h[3] + 0.5 * self.spec.dy(),
            ]
        })
    }
}

/// First k with |orbit_k| > radius, checking k = 0..=maxiter, else BOUNDED.
fn escape_count(
    start: Complex64,
    maxiter: u32,
    radius: f64,
    mut step: impl FnMut(u32, Complex64) -> Complex64,
) -> u32 {
    let r2 = radius * radius;
    let mut v = start;
    for k in 0..=maxiter {
        if v.norm_sqr() > r2 {
            return k;
        }
        if k < maxiter {
            v = step(k, v);
        }
    }
    BOUNDED
}

/// Escape-time grid for the base polynomial: a pixel is bounded when every
/// iterate through `maxiter` stays inside `radius`.
pub fn filled_julia_base(p: &Poly, spec: &GridSpec, maxiter: u32, radius: f64) -> EscapeGrid {
    let iters: Vec<u32> = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let ix = (i % spec.nx as usize) as u32;
            let iy = (i / spec.nx as usize) as u32;
            escape_count(spec.point(ix, iy), maxiter, radius, |_, v| p.eval(v))
        })
        .collect();
    EscapeGrid {
        spec: spec.clone(),
        iters,
        maxiter,
        radius,
    }
}

/// Escape-time grid for the fiber over a fixed base point z: pixel w is
/// bounded when the fiberwise composition along the orbit of z stays inside
/// `radius`. The base orbit is frozen once it passes the escape cap so that
/// overflow cannot masquerade as boundedness.
pub fn fiber_filled_julia(
    f: &SkewProduct,
    z: Complex64,
    spec: &GridSpec,
    maxiter: u32,
    radius: f64,
) -> EscapeGrid {
    let mut fibers = Vec::with_capacity(maxiter as usize);
    let mut zk = z;
    for _ in 0..maxiter {
        fibers.push(f.fiber().fiber_poly(zk));
        if zk.norm() <= ESCAPE_CAP {
            zk = f.base().eval(zk);
        }
    }
    let iters: Vec<u32> = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let ix = (i % spec.nx as usize) as u32;
            let iy = (i / spec.nx as usize) as u32;
            escape_count(spec.point(ix, iy), maxiter, radius, |k, w| {
                fibers[k as usize].eval(w)
            })
        })
        .collect();
    EscapeGrid {
        spec: spec.clone(),
        iters,
        maxiter,
        radius,
    }
}

fn neighbors4(spec: &GridSpec, ix: u32, iy: u32) -> impl Iterator<Item = (u32, u32)> {
    let (nx, ny) = (spec.nx, spec.ny);
    [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)]
        .into_iter()
        .filter_map(move |(dx, dy)| {
            let jx = ix as i64 + dx;
            let jy = iy as i64 + dy;
            if jx >= 0 && jy >= 0 && jx < nx as i64 && jy < ny as i64 {
                Some((jx as u32, jy as u32))
            } else {
                None
            }
        })
}

/// Centers of bounded pixels that touch an escaped pixel (4-adjacency).
/// Pixels on the grid edge do not count as boundary by themselves.
pub fn boundary_extract(grid: &EscapeGrid) -> Result<super::PointCloud, JuliaError> {
    let bounded = grid.bounded_count();
    if bounded == 0 || bounded == grid.spec.len() {
        return Err(JuliaError::EmptyBoundary);
    }
    let mut pts = Vec::new();
    for iy in 0..grid.spec.ny {
        for ix in 0..grid.spec.nx {
            if grid.is_bounded(ix, iy)
                && neighbors4(&grid.spec, ix, iy).any(|(jx, jy)| !grid.is_bounded(jx, jy))
            {
                pts.push(grid.spec.point(ix, iy));
            }
        }
    }
    if pts.is_empty() {
        return Err(JuliaError::EmptyBoundary);
    }
    Ok(super::PointCloud::plane(super::CloudTag::Generic, pts))
}

/// Sharpens the pixel boundary by bisecting each bounded/escaped neighbor
/// pair on the escape predicate. The result lies on the boundary of the
/// escape-within-maxiter region, which at reasonable maxiter is within
/// floating point noise of the Julia set; pixel centers alone drift off the
/// set under iteration, which ruins downstream distance bounds.
pub fn refine_boundary(
    grid: &EscapeGrid,
    escapes: impl Fn(Complex64) -> bool + Sync,
) -> Result<super::PointCloud, JuliaError> {
    let bounded = grid.bounded_count();
    if bounded == 0 || bounded == grid.spec.len() {
        return Err(JuliaError::EmptyBoundary);
    }
    let mut pairs = Vec::new();
    for iy in 0..grid.spec.ny {
        for ix in 0..grid.spec.nx {
            if !grid.is_bounded(ix, iy) {
                continue;
            }
            for (jx, jy) in neighbors4(&grid.spec, ix, iy) {
                if !grid.is_bounded(jx, jy) {
                    pairs.push((grid.spec.point(ix, iy), grid.spec.point(jx, jy)));
                }
            }
        }
    }
    if pairs.is_empty() {
        return Err(JuliaError::EmptyBoundary);
    }
    let pts: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(inside, outside)| {
            let mut lo = inside;
            let mut hi = outside;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if escapes(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    Ok(super::PointCloud::plane(super::CloudTag::Generic, pts))
}

/// Refined base Julia boundary for the polynomial that produced `grid`.
pub fn refine_boundary_base(p: &Poly, grid: &EscapeGrid) -> Result<super::PointCloud, JuliaError> {
    let (maxiter, radius) = (grid.maxiter, grid.radius);
    let cloud = refine_boundary(grid, |z0| {
        escape_count(z0, maxiter, radius, |_, v| p.eval(v)) != BOUNDED
    })?;
    Ok(cloud.with_tag(super::CloudTag::BaseJulia))
}

/// Refined fiber Julia boundary over base point z.
pub fn refine_boundary_fiber(
    f: &SkewProduct,
    z: Complex64,
    grid: &EscapeGrid,
) -> Result<super::PointCloud, JuliaError> {
    let mut fibers = Vec::with_capacity(grid.maxiter as usize);
    let mut zk = z;
    for _ in 0..grid.maxiter {
        fibers.push(f.fiber().fiber_poly(zk));
        if zk.norm() <= ESCAPE_CAP {
            zk = f.base().eval(zk);
        }
    }
    let (maxiter, radius) = (grid.maxiter, grid.radius);
    let cloud = refine_boundary(grid, |w0| {
        escape_count(w0, maxiter, radius, |k, w| fibers[k as usize].eval(w)) != BOUNDED
    })?;
    Ok(cloud.with_tag(super::CloudTag::FiberJulia))
}

/// Number of 4-connected components of the bounded pixel set.
pub fn bounded_components(grid: &EscapeGrid) -> usize {
    let (nx, ny) = (grid.spec.nx, grid.spec.ny);
    let mut seen = vec![false; grid.spec.len()];
    let mut components = 0;
    let mut stack = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let start = grid.idx(ix, iy);
            if seen[start] || !grid.is_bounded(ix, iy) {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push((ix, iy));
            while let Some((cx, cy)) = stack.pop() {
                for (jx, jy) in neighbors4(&grid.spec, cx, cy) {
                    let j = grid.idx(jx, jy);
                    if !seen[j] && grid.is_bounded(jx, jy) {
                        seen[j] = true;
                        stack.push((jx, jy));
                    }
                }
            }
        }
    }
    components
}

#[derive(Debug, Clone, PartialEq)]
pub enum Connectivity {
    Connected,
    Disconnected { escaping: Vec<Complex64> },
}

/// Connectivity of the filled Julia set via the critical orbit criterion:
/// connected exactly when every critical point has a bounded orbit. Orbits
/// that end close to the escape radius without crossing it are reported as
/// inconclusive rather than guessed; parabolic parameters sit there.
pub fn connectivity_test(p: &Poly, maxiter: u32, radius: f64) -> Result<Connectivity, JuliaError> {
    if p.degree() < 2 {
        return Err(JuliaError::Invalid(
            "connectivity needs degree at least 2".into(),
        ));
    }
    let crit = poly_roots(&p.derivative(), DEFAULT_ROOT_TOL)?;
    let mut escaping = Vec::new();
    let mut borderline = Vec::new();
    for &(c, _) in &crit.roots {
        let mut v = c;
        let mut escaped = false;
        for _ in 0..maxiter {
            if v.norm() > radius {
                escaped = true;
                break;
            }
            v = p.eval(v);
        }
        if escaped || v.norm() > radius {
            escaping.push(c);
        } else if v.norm() > radius * (1.0 - 1e-6) {
            borderline.push(c);
        }
    }
    if !escaping.is_empty() {
        Ok(Connectivity::Disconnected { escaping })
    } else if !borderline.is_empty() {
        Err(JuliaError::Inconclusive { borderline })
    } else {
        Ok(Connectivity::Connected)
    }
}
