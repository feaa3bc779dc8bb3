//! Point-set primitives: resampling, normalization, exact nearest-neighbor
//! search, and the Chamfer distance with its gradient.
//!
//! All operations are pure functions of their inputs and safe to call from
//! multiple threads. [`NnIndex`] is immutable after construction.

mod chamfer;
mod kdtree;

pub use chamfer::{chamfer, chamfer_directed_max, chamfer_grad, nn_correspondences};
pub(crate) use chamfer::{directed_mean, grad_from_correspondences};
pub use kdtree::NnIndex;

use crate::error::{Error, Result};
use rand::Rng;

/// An ordered list of 3D points in model units. Point order carries no
/// semantic meaning; consumers are permutation-insensitive unless documented
/// otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<[f64; 3]>,
}

impl PointCloud {
    /// Builds a cloud, rejecting empty input and non-finite coordinates.
    pub fn new(points: Vec<[f64; 3]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonFinitePoint);
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: the constructor rejects empty clouds.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for p in &self.points {
            for a in 0..3 {
                c[a] += p[a];
            }
        }
        let n = self.points.len() as f64;
        [c[0] / n, c[1] / n, c[2] / n]
    }
}

#[inline]
pub(crate) fn dist2(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let dz = p[2] - q[2];
    dx * dx + dy * dy + dz * dz
}

/// Resamples a cloud to exactly `m` points.
///
/// With `|cloud| >= m` the output is `m` distinct source indices drawn
/// uniformly without replacement; otherwise every input point appears at
/// least once and the remainder are uniform duplicates. Deterministic for a
/// fixed RNG state.
pub fn resample<R: Rng>(cloud: &PointCloud, m: usize, rng: &mut R) -> Result<PointCloud> {
    if m == 0 {
        return Err(Error::Degenerate("resample target of zero points".into()));
    }
    let n = cloud.len();
    let src = cloud.points();
    let mut out = Vec::with_capacity(m);
    if n >= m {
        for idx in rand::seq::index::sample(rng, n, m) {
            out.push(src[idx]);
        }
    } else {
        out.extend_from_slice(src);
        for _ in n..m {
            out.push(src[rng.random_range(0..n)]);
        }
    }
    PointCloud::new(out)
}

/// Centers a cloud on its centroid and scales the farthest point to unit
/// radius. A fully degenerate cloud (all points coincident) maps to all
/// zeros.
pub fn normalize_unit_sphere(cloud: &PointCloud) -> PointCloud {
    let c = cloud.centroid();
    let mut radius: f64 = 0.0;
    for p in cloud.points() {
        radius = radius.max(dist2(p, &c).sqrt());
    }
    let points = if radius < 1e-12 {
        vec![[0.0; 3]; cloud.len()]
    } else {
        cloud
            .points()
            .iter()
            .map(|p| {
                [
                    (p[0] - c[0]) / radius,
                    (p[1] - c[1]) / radius,
                    (p[2] - c[2]) / radius,
                ]
            })
            .collect()
    };
    PointCloud { points }
}

/// Per-axis population variance (division by n, not n-1).
pub fn axis_variances(cloud: &PointCloud) -> [f64; 3] {
    let c = cloud.centroid();
    let mut v = [0.0; 3];
    for p in cloud.points() {
        for a in 0..3 {
            let d = p[a] - c[a];
            v[a] += d * d;
        }
    }
    let n = cloud.len() as f64;
    [v[0] / n, v[1] / n, v[2] / n]
}
