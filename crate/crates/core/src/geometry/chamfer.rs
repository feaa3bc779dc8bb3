//! Chamfer distance between point sets and its gradient.
//!
//! The distance is the sum of both directed average nearest-neighbor terms,
//! using unsquared Euclidean distances:
//!
//! ```text
//! d(P, Q) = (1/|P|) sum_p min_q |p - q| + (1/|Q|) sum_q min_p |q - p|
//! ```
//!
//! The gradient holds nearest-neighbor correspondences fixed at their current
//! assignment (the standard Chamfer subgradient for this piecewise-smooth
//! loss); a matched pair at distance exactly zero contributes a zero
//! subgradient.

use super::{NnIndex, PointCloud};
use crate::error::Result;

/// Nearest neighbor in the indexed cloud for every point of `from`, as
/// `(index, distance)` pairs in `from` order.
pub fn nn_correspondences(from: &PointCloud, to: &NnIndex) -> Vec<(usize, f64)> {
    from.points().iter().map(|p| to.nearest(p)).collect()
}

pub(crate) fn directed_mean(corr: &[(usize, f64)]) -> f64 {
    corr.iter().map(|&(_, d)| d).sum::<f64>() / corr.len() as f64
}

/// Chamfer distance between two nonempty clouds (sum of both directed terms).
pub fn chamfer(p: &PointCloud, q: &PointCloud) -> Result<f64> {
    let (fwd, rev) = correspondences_both(p, q);
    Ok(directed_mean(&fwd) + directed_mean(&rev))
}

/// Variant taking the maximum of the two directed averages instead of their
/// sum. Not used by the training loss; exposed for experimentation.
pub fn chamfer_directed_max(p: &PointCloud, q: &PointCloud) -> Result<f64> {
    let (fwd, rev) = correspondences_both(p, q);
    Ok(directed_mean(&fwd).max(directed_mean(&rev)))
}

fn correspondences_both(
    p: &PointCloud,
    q: &PointCloud,
) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
    let q_index = NnIndex::new(q);
    let p_index = NnIndex::new(p);
    (
        nn_correspondences(p, &q_index),
        nn_correspondences(q, &p_index),
    )
}

/// Gradient of [`chamfer`]`(p, q)` with respect to every point of `p`.
pub fn chamfer_grad(p: &PointCloud, q: &PointCloud) -> Result<Vec<[f64; 3]>> {
    let q_index = NnIndex::new(q);
    let p_index = NnIndex::new(p);
    let fwd = nn_correspondences(p, &q_index);
    let rev = nn_correspondences(q, &p_index);
    Ok(grad_from_correspondences(p, q, &fwd, &rev))
}

/// Gradient w.r.t. `p` given precomputed correspondences `fwd` (p into q) and
/// `rev` (q into p).
pub(crate) fn grad_from_correspondences(
    p: &PointCloud,
    q: &PointCloud,
    fwd: &[(usize, f64)],
    rev: &[(usize, f64)],
) -> Vec<[f64; 3]> {
    let np = p.len() as f64;
    let nq = q.len() as f64;
    let mut grad = vec![[0.0f64; 3]; p.len()];
    // Forward term: each p moves toward its nearest q.
    for (i, &(j, d)) in fwd.iter().enumerate() {
        if d > 0.0 {
            let pi = &p.points()[i];
            let qj = &q.points()[j];
            for a in 0..3 {
                grad[i][a] += (pi[a] - qj[a]) / (d * np);
            }
        }
    }
    // Reverse term: each q pulls its nearest p.
    for (j, &(i, d)) in rev.iter().enumerate() {
        if d > 0.0 {
            let pi = &p.points()[i];
            let qj = &q.points()[j];
            for a in 0..3 {
                grad[i][a] += (pi[a] - qj[a]) / (d * nq);
            }
        }
    }
    grad
}
