//! Escape-time grids, Julia set boundaries, Green's function and external
//! rays, and the point cloud metrics used to compare the resulting sets.
//!
//! Everything here works per pixel or per sample point with no shared state,
//! so the parallel loops give bit-identical output at any thread count.

mod grid;
mod io;
mod metric;
mod ray;

pub use grid::{
    boundary_extract, bounded_components, connectivity_test, filled_julia_base,
    fiber_filled_julia, refine_boundary, refine_boundary_base, refine_boundary_fiber,
    Connectivity, EscapeGrid, GridSpec, BOUNDED,
};
pub use io::{
    read_grid_binary, write_cloud_csv, write_grid_binary, write_grid_ppm, write_ray_csv,
};
pub use metric::{hausdorff_distance, min_distance, CloudPoints, CloudTag, PointCloud};
pub use ray::{green_potential, trace_external_ray, ExternalRayTrace, GreenSample};

use crate::numeric::NumericError;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JuliaError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("grid has no boundary pixels (all bounded or all escaped)")]
    EmptyBoundary,
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point clouds mix plane and space points")]
    MixedClouds,
    #[error("{} critical orbit(s) neither escaped nor clearly bounded", borderline.len())]
    Inconclusive { borderline: Vec<Complex64> },
    #[error("ray continuation stalled at potential {potential:.3e} after {} points", partial.len())]
    RayBlocked {
        potential: f64,
        partial: Vec<Complex64>,
    },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}
