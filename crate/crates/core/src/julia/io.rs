//! File formats for grids, clouds, and ray traces.
//!
//! The binary grid layout, all little-endian:
//!   u32 nx, u32 ny,
//!   f64 center re, f64 center im, f64 half width, f64 half height,
//!   f64 escape radius, u32 maxiter,
//!   then nx*ny u32 counts row-major from the bottom row up,
//!   with 0xFFFFFFFF marking a bounded pixel.

use super::grid::{EscapeGrid, GridSpec, BOUNDED};
use super::metric::{CloudPoints, PointCloud};
use super::ray::ExternalRayTrace;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

/// P6 image: bounded pixels black, escaped pixels shaded by escape count.
/// Rows are written top down.
pub fn write_grid_ppm(grid: &EscapeGrid, path: &Path) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let (nx, ny) = (grid.spec.nx, grid.spec.ny);
    write!(out, "P6\n{nx} {ny}\n255\n")?;
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            let c = grid.count(ix, iy);
            let px = if c == BOUNDED {
                [0u8, 0, 0]
            } else {
                let shade = 40 + (c as u64 * 215 / grid.maxiter.max(1) as u64) as u8;
                [shade, shade, shade]
            };
            out.write_all(&px)?;
        }
    }
    out.flush()
}

pub fn write_grid_binary(grid: &EscapeGrid, path: &Path) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&grid.spec.nx.to_le_bytes())?;
    out.write_all(&grid.spec.ny.to_le_bytes())?;
    for v in [
        grid.spec.center.re,
        grid.spec.center.im,
        grid.spec.half_width,
        grid.spec.half_height,
        grid.radius,
    ] {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&grid.maxiter.to_le_bytes())?;
    for c in &grid.iters {
        out.write_all(&c.to_le_bytes())?;
    }
    out.flush()
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_grid_binary(path: &Path) -> io::Result<EscapeGrid> {
    let mut input = BufReader::new(File::open(path)?);
    let nx = read_u32(&mut input)?;
    let ny = read_u32(&mut input)?;
    let cre = read_f64(&mut input)?;
    let cim = read_f64(&mut input)?;
    let hw = read_f64(&mut input)?;
    let hh = read_f64(&mut input)?;
    let radius = read_f64(&mut input)?;
    let maxiter = read_u32(&mut input)?;
    let spec = GridSpec::new(num_complex::Complex64::new(cre, cim), hw, hh, nx, ny)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    let mut iters = Vec::with_capacity(spec.len());
    for _ in 0..spec.len() {
        let c = read_u32(&mut input)?;
        if c != BOUNDED && c > maxiter {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                "escape count above maxiter",
            ));
        }
        iters.push(c);
    }
    Ok(EscapeGrid {
        spec,
        iters,
        maxiter,
        radius,
    })
}

/// CSV with a header; plane clouds get re,im and space clouds re,im,wre,wim.
pub fn write_cloud_csv(cloud: &PointCloud, path: &Path) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match &cloud.pts {
        CloudPoints::Plane(v) => {
            writeln!(out, "re,im")?;
            for p in v {
                writeln!(out, "{:.17e},{:.17e}", p.re, p.im)?;
            }
        }
        CloudPoints::Space(v) => {
            writeln!(out, "re,im,wre,wim")?;
            for p in v {
                writeln!(
                    out,
                    "{:.17e},{:.17e},{:.17e},{:.17e}",
                    p.z.re, p.z.im, p.w.re, p.w.im
                )?;
            }
        }
    }
    out.flush()
}

pub fn write_ray_csv(trace: &ExternalRayTrace, path: &Path) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "potential,re,im")?;
    for (g, p) in trace.potentials.iter().zip(&trace.points) {
        writeln!(out, "{:.17e},{:.17e},{:.17e}", g, p.re, p.im)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::julia::{filled_julia_base, GridSpec};
    use crate::numeric::Poly;
    use num_complex::Complex64;

    #[test]
    fn binary_grid_roundtrip() {
        let p = Poly::from_real(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        let spec = GridSpec::square(Complex64::new(0.1, -0.2), 1.5, 24).unwrap();
        let g = filled_julia_base(&p, &spec, 60, 4.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.bin");
        write_grid_binary(&g, &path).unwrap();
        let back = read_grid_binary(&path).unwrap();
        assert_eq!(back.spec, g.spec);
        assert_eq!(back.iters, g.iters);
        assert_eq!(back.maxiter, g.maxiter);
        assert_eq!(back.radius, g.radius);
    }

    #[test]
    fn ppm_has_correct_header_and_size() {
        let p = Poly::from_real(&[0.0, 0.0, 1.0]);
        let spec = GridSpec::square(Complex64::new(0.0, 0.0), 2.0, 16).unwrap();
        let g = filled_julia_base(&p, &spec, 30, 2.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.ppm");
        write_grid_ppm(&g, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P6\n16 16\n255\n"));
        assert_eq!(bytes.len(), b"P6\n16 16\n255\n".len() + 16 * 16 * 3);
    }
}
