//! Point clouds in the plane or in C^2 and the set distances between them.

use super::JuliaError;
use crate::dynamics::Point2;
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudTag {
    BaseJulia,
    FiberJulia,
    Postcritical,
    J2Sample,
    Generic,
}

#[derive(Debug, Clone)]
pub enum CloudPoints {
    Plane(Vec<Complex64>),
    Space(Vec<Point2>),
}

#[derive(Debug, Clone)]
pub struct PointCloud {
    pub pts: CloudPoints,
    pub tag: CloudTag,
}

impl PointCloud {
    pub fn plane(tag: CloudTag, pts: Vec<Complex64>) -> Self {
        PointCloud {
            pts: CloudPoints::Plane(pts),
            tag,
        }
    }

    pub fn space(tag: CloudTag, pts: Vec<Point2>) -> Self {
        PointCloud {
            pts: CloudPoints::Space(pts),
            tag,
        }
    }

    pub fn with_tag(mut self, tag: CloudTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn len(&self) -> usize {
        match &self.pts {
            CloudPoints::Plane(v) => v.len(),
            CloudPoints::Space(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn plane_points(&self) -> Option<&[Complex64]> {
        match &self.pts {
            CloudPoints::Plane(v) => Some(v),
            CloudPoints::Space(_) => None,
        }
    }

    pub fn space_points(&self) -> Option<&[Point2]> {
        match &self.pts {
            CloudPoints::Space(v) => Some(v),
            CloudPoints::Plane(_) => None,
        }
    }

    /// Removes points within `eps` of an already kept point. Input order is
    /// normalized by sorting first, so the result is independent of how the
    /// cloud was assembled.
    pub fn dedup(self, eps: f64) -> Self {
        match self.pts {
            CloudPoints::Plane(mut v) => {
                v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
                let mut kept: Vec<Complex64> = Vec::with_capacity(v.len());
                for p in v {
                    let clash = kept
                        .iter()
                        .rev()
                        .take_while(|k| p.re - k.re <= eps)
                        .any(|k| (p - k).norm() <= eps);
                    if !clash {
                        kept.push(p);
                    }
                }
                PointCloud::plane(self.tag, kept)
            }
            CloudPoints::Space(mut v) => {
                v.sort_by(|a, b| {
                    a.z.re
                        .total_cmp(&b.z.re)
                        .then(a.z.im.total_cmp(&b.z.im))
                        .then(a.w.re.total_cmp(&b.w.re))
                        .then(a.w.im.total_cmp(&b.w.im))
                });
                let mut kept: Vec<Point2> = Vec::with_capacity(v.len());
                for p in v {
                    let clash = kept
                        .iter()
                        .rev()
                        .take_while(|k| p.z.re - k.z.re <= eps)
                        .any(|k| p.dist(k) <= eps);
                    if !clash {
                        kept.push(p);
                    }
                }
                PointCloud::space(self.tag, kept)
            }
        }
    }

    /// Component label per point under single-linkage at radius `eps`,
    /// contiguous from 0 in order of first appearance.
    pub fn components(&self, eps: f64) -> Vec<usize> {
        let n = self.len();
        let dist = |i: usize, j: usize| -> f64 {
            match &self.pts {
                CloudPoints::Plane(v) => (v[i] - v[j]).norm(),
                CloudPoints::Space(v) => v[i].dist(&v[j]),
            }
        };
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for i in 0..n {
            if label[i] != usize::MAX {
                continue;
            }
            label[i] = next;
            stack.push(i);
            while let Some(a) = stack.pop() {
                for b in 0..n {
                    if label[b] == usize::MAX && dist(a, b) <= eps {
                        label[b] = next;
                        stack.push(b);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

fn directed(from: &PointCloud, to: &PointCloud) -> f64 {
    let inf_to = |i: usize| -> f64 {
        match (&from.pts, &to.pts) {
            (CloudPoints::Plane(a), CloudPoints::Plane(b)) => b
                .iter()
                .map(|q| (a[i] - q).norm())
                .fold(f64::INFINITY, f64::min),
            (CloudPoints::Space(a), CloudPoints::Space(b)) => {
                b.iter().map(|q| a[i].dist(q)).fold(f64::INFINITY, f64::min)
            }
            _ => unreachable!("kinds checked by callers"),
        }
    };
    (0..from.len())
        .into_par_iter()
        .map(inf_to)
        .reduce(|| 0.0, f64::max)
}

fn check_pair(a: &PointCloud, b: &PointCloud) -> Result<(), JuliaError> {
    if a.is_empty() || b.is_empty() {
        return Err(JuliaError::EmptyCloud);
    }
    let mixed = matches!(
        (&a.pts, &b.pts),
        (CloudPoints::Plane(_), CloudPoints::Space(_)) | (CloudPoints::Space(_), CloudPoints::Plane(_))
    );
    if mixed {
        return Err(JuliaError::MixedClouds);
    }
    Ok(())
}

/// Hausdorff distance between finite clouds, exact up to rounding.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64, JuliaError> {
    check_pair(a, b)?;
    Ok(directed(a, b).max(directed(b, a)))
}

/// Smallest pairwise distance between two clouds.
pub fn min_distance(a: &PointCloud, b: &PointCloud) -> Result<f64, JuliaError> {
    check_pair(a, b)?;
    let d = (0..a.len())
        .into_par_iter()
        .map(|i| match (&a.pts, &b.pts) {
            (CloudPoints::Plane(x), CloudPoints::Plane(y)) => y
                .iter()
                .map(|q| (x[i] - q).norm())
                .fold(f64::INFINITY, f64::min),
            (CloudPoints::Space(x), CloudPoints::Space(y)) => {
                y.iter().map(|q| x[i].dist(q)).fold(f64::INFINITY, f64::min)
            }
            _ => unreachable!("kinds checked above"),
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(d)
}
