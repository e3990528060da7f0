//! Serialization of parameter-space products.

use std::fs::File;
use std::io::{BufWriter, Result as IoResult, Write};
use std::path::Path;

use super::{BiquadParams, LocusClass, LocusGrid};

/// Binary PPM of a classified parameter rectangle, rows written top-down.
///
/// Palette: connected (30, 30, 70), escaping (235, 235, 235), boundary
/// (205, 60, 60), inconclusive (245, 200, 70).
pub fn write_locus_ppm(grid: &LocusGrid, path: &Path) -> IoResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P6\n{} {}\n255\n", grid.na, grid.nb)?;
    for ib in (0..grid.nb).rev() {
        for ia in 0..grid.na {
            let rgb: [u8; 3] = match grid.class(ia, ib) {
                LocusClass::Connected => [30, 30, 70],
                LocusClass::Escaping(_) => [235, 235, 235],
                LocusClass::BoundaryWithinTol => [205, 60, 60],
                LocusClass::Inconclusive => [245, 200, 70],
            };
            out.write_all(&rgb)?;
        }
    }
    out.flush()
}

/// CSV of a sampled parameter curve with columns `t,a,b`.
pub fn write_curve_csv(rows: &[(f64, BiquadParams)], path: &Path) -> IoResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "t,a,b")?;
    for (t, params) in rows {
        writeln!(out, "{:.17e},{:.17e},{:.17e}", t, params.a, params.b)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biquad::classify_grid;

    #[test]
    fn locus_ppm_and_curve_csv_have_expected_shape() {
        let dir = tempfile::tempdir().unwrap();
        let grid = classify_grid(-3.0, 1.0, -3.0, 1.0, 8, 6, 64).unwrap();
        let ppm = dir.path().join("locus.ppm");
        write_locus_ppm(&grid, &ppm).unwrap();
        let bytes = std::fs::read(&ppm).unwrap();
        assert!(bytes.starts_with(b"P6\n8 6\n255\n"));
        assert_eq!(bytes.len(), "P6\n8 6\n255\n".len() + 8 * 6 * 3);

        let csv = dir.path().join("curve.csv");
        let rows: Vec<_> = (0..5)
            .map(|i| {
                let t = 0.7 + 0.2 * i as f64;
                (t, crate::biquad::per1_curve(t.min(1.5)).unwrap())
            })
            .collect();
        write_curve_csv(&rows, &csv).unwrap();
        let text = std::fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("t,a,b\n"));
        assert_eq!(text.lines().count(), 6);
    }
}
