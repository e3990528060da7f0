//! Tail estimators for where critical orbits pile up.
//!
//! All three kinds watch the same window of each orbit, steps `n_skip`
//! through `n_skip + n_tail`. They differ in what an escape costs: the
//! pointwise estimate throws the whole orbit away, the others keep whatever
//! the orbit produced while it was still bounded. That difference is the
//! observable content of the estimators: transient passes show up only in
//! the fuller ones.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::InvariantError;
use crate::dynamics::{Point2, SkewProduct};
use crate::julia::{CloudTag, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccumulationKind {
    /// Only orbits that stay bounded through the whole window contribute.
    Pointwise,
    /// As Pointwise, with the samples first grouped by base component and
    /// the grouping recorded alongside the points.
    Componentwise,
    /// Every bounded window iterate contributes, even from orbits that
    /// escape later.
    Full,
}

impl AccumulationKind {
    fn name(&self) -> &'static str {
        match self {
            AccumulationKind::Pointwise => "pointwise",
            AccumulationKind::Componentwise => "componentwise",
            AccumulationKind::Full => "full",
        }
    }
}

/// Window and clustering settings an estimate was computed with.
#[derive(Debug, Clone)]
pub struct AccumulationParams {
    pub kind: AccumulationKind,
    pub n_skip: usize,
    pub n_tail: usize,
    pub cluster_eps: f64,
    /// Base-component linkage radius (Componentwise only): twice the median
    /// nearest-neighbor spacing of the sample base points, so pixel clouds
    /// group at two-pixel adjacency. Resolution-dependent by construction.
    pub component_eps: Option<f64>,
}

/// A connected clump of the estimate cloud.
#[derive(Debug, Clone)]
pub struct AccCluster {
    pub centroid: Point2,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct AccumulationEstimate {
    /// Collected window points, deduplicated at `cluster_eps`.
    pub cloud: PointCloud,
    pub params: AccumulationParams,
    pub n_orbits: usize,
    /// Orbits that escaped within the window horizon.
    pub n_escaped: usize,
    /// Number of base components of the sample set (Componentwise only).
    pub n_base_components: Option<usize>,
}

impl AccumulationEstimate {
    /// Single-linkage clumps of the estimate at `3 * cluster_eps`, largest
    /// first.
    pub fn clusters(&self) -> Vec<AccCluster> {
        let pts = match self.cloud.space_points() {
            Some(p) if !p.is_empty() => p,
            _ => return Vec::new(),
        };
        let labels = self.cloud.components(3.0 * self.params.cluster_eps);
        let n = labels.iter().max().map_or(0, |&m| m + 1);
        let mut sums = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0usize); n];
        for (pt, &l) in pts.iter().zip(&labels) {
            sums[l].0 += pt.z;
            sums[l].1 += pt.w;
            sums[l].2 += 1;
        }
        let mut out: Vec<AccCluster> = sums
            .into_iter()
            .map(|(sz, sw, k)| AccCluster {
                centroid: Point2::new(sz / k as f64, sw / k as f64),
                count: k,
            })
            .collect();
        out.sort_by(|a, b| {
            b.count
                .cmp(&a.count)
                .then(a.centroid.z.re.total_cmp(&b.centroid.z.re))
                .then(a.centroid.z.im.total_cmp(&b.centroid.z.im))
                .then(a.centroid.w.re.total_cmp(&b.centroid.w.re))
        });
        out
    }

    pub fn to_json(&self) -> Value {
        let clusters: Vec<Value> = self
            .clusters()
            .iter()
            .map(|c| {
                json!({
                    "center_z": [c.centroid.z.re, c.centroid.z.im],
                    "center_w": [c.centroid.w.re, c.centroid.w.im],
                    "count": c.count,
                })
            })
            .collect();
        json!({
            "kind": self.params.kind.name(),
            "params": {
                "n_skip": self.params.n_skip,
                "n_tail": self.params.n_tail,
                "cluster_eps": self.params.cluster_eps,
                "component_eps": self.params.component_eps,
                "n_orbits": self.n_orbits,
                "n_escaped": self.n_escaped,
                "n_base_components": self.n_base_components,
            },
            "clusters": clusters,
        })
    }
}

/// Median distance from a sample base point to its nearest neighbor.
fn median_nn_spacing(zs: &[Complex64]) -> Option<f64> {
    if zs.len() < 2 {
        return None;
    }
    let mut nn: Vec<f64> = zs
        .par_iter()
        .enumerate()
        .map(|(i, &z)| {
            zs.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &o)| (z - o).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nn.sort_by(f64::total_cmp);
    let m = nn[nn.len() / 2];
    if m > 0.0 && m.is_finite() {
        Some(m)
    } else {
        None
    }
}

/// Runs every sample orbit through the window and keeps what the chosen
/// estimator keeps. The result cloud is deduplicated at `cluster_eps`;
/// escapes are counted per orbit.
pub fn estimate_accumulation(
    f: &SkewProduct,
    kind: AccumulationKind,
    samples: &PointCloud,
    n_skip: usize,
    n_tail: usize,
    cluster_eps: f64,
) -> Result<AccumulationEstimate, InvariantError> {
    let seeds = samples
        .space_points()
        .ok_or_else(|| InvariantError::Invalid("samples must be points in C^2".into()))?;
    if !(cluster_eps > 0.0) || !cluster_eps.is_finite() {
        return Err(InvariantError::Invalid(format!(
            "cluster radius must be positive, got {cluster_eps}"
        )));
    }
    let horizon = n_skip + n_tail;
    let rz = f.base_escape_radius();
    let rw = f.fiber_escape_radius();

    let runs: Vec<(Vec<Point2>, bool)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut pt = seed;
            let mut out = Vec::new();
            let mut escaped = false;
            for t in 0..=horizon {
                if pt.z.norm() > rz || pt.w.norm() > rw {
                    escaped = true;
                    break;
                }
                if t >= n_skip {
                    out.push(pt);
                }
                if t < horizon {
                    pt = f.step(pt);
                }
            }
            (out, escaped)
        })
        .collect();

    let n_escaped = runs.iter().filter(|(_, e)| *e).count();
    let pts: Vec<Point2> = runs
        .into_iter()
        .filter(|(_, escaped)| kind == AccumulationKind::Full || !escaped)
        .flat_map(|(pts, _)| pts)
        .collect();

    let (component_eps, n_base_components) = if kind == AccumulationKind::Componentwise {
        let zs: Vec<Complex64> = seeds.iter().map(|p| p.z).collect();
        let eps = median_nn_spacing(&zs).map_or(cluster_eps, |m| 2.0 * m);
        let labels = PointCloud::plane(CloudTag::Generic, zs).components(eps);
        let n = labels.iter().max().map_or(0, |&m| m + 1);
        (Some(eps), Some(n))
    } else {
        (None, None)
    };

    Ok(AccumulationEstimate {
        cloud: PointCloud::space(CloudTag::Generic, pts).dedup(cluster_eps),
        params: AccumulationParams {
            kind,
            n_skip,
            n_tail,
            cluster_eps,
            component_eps,
        },
        n_orbits: seeds.len(),
        n_escaped,
        n_base_components,
    })
}
