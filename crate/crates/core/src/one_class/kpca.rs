//! Kernel-PCA novelty detection.
//!
//! Fitting eigendecomposes the doubly centered Gram matrix and keeps the
//! leading components. Scoring measures how much of a query's centered
//! feature-space direction falls outside that span:
//!
//! ```text
//! score(z) = max(0, 1 - sum_k cos^2(phi~(z), v_k))
//! ```
//!
//! which is 0 for queries inside the span and 1 for queries orthogonal to
//! it. Everything is evaluated through the kernel; feature coordinates are
//! never materialized.

use super::kernel::{kernel_matrix, KernelSpec};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Eigenvalues at or below this are treated as numerically zero.
const EIGEN_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct KpcaNdModel {
    pub(crate) kernel: KernelSpec,
    pub(crate) rows: Vec<Vec<f64>>,
    /// Retained eigenvalues of the centered Gram matrix, descending.
    pub(crate) lambdas: Vec<f64>,
    /// Row k holds the expansion coefficients of feature eigenvector k;
    /// scaled so the feature vector has unit norm.
    pub(crate) coeffs: Vec<Vec<f64>>,
    /// Row means of the uncentered Gram matrix.
    pub(crate) row_means: Vec<f64>,
    /// Grand mean of the uncentered Gram matrix.
    pub(crate) total_mean: f64,
}

impl KpcaNdModel {
    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn components(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }
}

pub fn fit_kpcand(rows: &[Vec<f64>], kernel: KernelSpec, q: usize) -> Result<KpcaNdModel> {
    kernel.validate()?;
    let n = rows.len();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 training vectors, got {n}"
        )));
    }
    if q < 1 || q > n - 1 {
        return Err(Error::Degenerate(format!(
            "component count must lie in 1..={}, got {q}",
            n - 1
        )));
    }
    let d = rows[0].len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != d {
            return Err(Error::Dimension {
                expected: d,
                got: r.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("training vector {i}")));
        }
    }

    let k = kernel_matrix(rows, rows, &kernel);
    let row_means: Vec<f64> = (0..n).map(|i| k.row(i).sum() / n as f64).collect();
    let total_mean = row_means.iter().sum::<f64>() / n as f64;
    let centered = DMatrix::from_fn(n, n, |i, j| {
        k[(i, j)] - row_means[i] - row_means[j] + total_mean
    });

    let eig = nalgebra::SymmetricEigen::new(centered);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let mut lambdas = Vec::new();
    let mut coeffs = Vec::new();
    for &idx in order.iter().take(q) {
        let lambda = eig.eigenvalues[idx];
        if lambda <= EIGEN_FLOOR {
            break;
        }
        let scale = 1.0 / lambda.sqrt();
        let mut a: Vec<f64> = eig.eigenvectors.column(idx).iter().map(|v| v * scale).collect();
        // Deterministic sign: the largest-magnitude coefficient is positive.
        let mut pivot = 0;
        for (i, v) in a.iter().enumerate() {
            if v.abs() > a[pivot].abs() {
                pivot = i;
            }
        }
        if a[pivot] < 0.0 {
            for v in &mut a {
                *v = -*v;
            }
        }
        lambdas.push(lambda);
        coeffs.push(a);
    }
    if lambdas.is_empty() {
        return Err(Error::Degenerate("degenerate kernel".into()));
    }

    Ok(KpcaNdModel {
        kernel,
        rows: rows.to_vec(),
        lambdas,
        coeffs,
        row_means,
        total_mean,
    })
}

/// Fraction of the query's centered feature direction outside the
/// retained span; always in `[0, 1]`.
pub fn score_kpcand(model: &KpcaNdModel, z: &[f64]) -> f64 {
    let n = model.rows.len();
    let k_z: Vec<f64> = model.rows.iter().map(|x| model.kernel.eval(x, z)).collect();
    let mean_kz = k_z.iter().sum::<f64>() / n as f64;
    let norm_sq = model.kernel.eval(z, z) - 2.0 * mean_kz + model.total_mean;
    if norm_sq < 1e-24 {
        // The centered feature vector vanishes; treat the query as lying
        // in the span.
        return 0.0;
    }
    let centered: Vec<f64> = (0..n)
        .map(|i| k_z[i] - mean_kz - model.row_means[i] + model.total_mean)
        .collect();
    let mut captured = 0.0;
    for a in &model.coeffs {
        let proj: f64 = a.iter().zip(&centered).map(|(c, v)| c * v).sum();
        captured += proj * proj;
    }
    (1.0 - captured / norm_sq).max(0.0)
}
