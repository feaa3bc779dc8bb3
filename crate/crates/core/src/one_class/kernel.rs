//! Kernel functions over latent vectors.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    Linear,
    /// `exp(-gamma * ||x - y||^2)`
    Rbf { gamma: f64 },
    /// `exp(-||x - y||^2 / (2 * sigma^2))`
    Gaussian { sigma: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { gamma } => {
                if gamma.is_finite() && gamma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Degenerate("rbf gamma must be positive".into()))
                }
            }
            KernelSpec::Gaussian { sigma } => {
                if sigma.is_finite() && sigma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Degenerate("gaussian sigma must be positive".into()))
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match *self {
            KernelSpec::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            KernelSpec::Rbf { gamma } => (-gamma * sq_dist(x, y)).exp(),
            KernelSpec::Gaussian { sigma } => (-sq_dist(x, y) / (2.0 * sigma * sigma)).exp(),
        }
    }
}

fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

/// Entry (i, j) is `k(x_i, y_j)`. Rows of `x` and `y` must share one
/// dimension.
pub fn kernel_matrix(x: &[Vec<f64>], y: &[Vec<f64>], k: &KernelSpec) -> DMatrix<f64> {
    DMatrix::from_fn(x.len(), y.len(), |i, j| k.eval(&x[i], &y[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn random_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = stream_rng(seed, &[41]);
        (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect()
    }

    #[test]
    fn rbf_of_identical_points_is_one() {
        let k = KernelSpec::Rbf { gamma: 0.7 };
        let x = vec![1.5, -2.0, 0.25];
        assert_eq!(k.eval(&x, &x), 1.0);
    }

    #[test]
    fn rbf_closed_form() {
        let k = KernelSpec::Rbf { gamma: 1.0 };
        let v = k.eval(&[0.0, 0.0], &[1.0, 0.0]);
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
        assert!((v - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn rbf_small_gamma_approaches_all_ones() {
        let rows = random_rows(6, 4, 1);
        let k = kernel_matrix(&rows, &rows, &KernelSpec::Rbf { gamma: 1e-12 });
        for v in k.iter() {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gaussian_matches_rbf_reparameterization() {
        let rows = random_rows(5, 3, 2);
        // sigma = 2 makes 2 * sigma^2 a power of two, so dividing by it and
        // multiplying by its reciprocal round identically.
        let sigma = 2.0;
        let g = kernel_matrix(&rows, &rows, &KernelSpec::Gaussian { sigma });
        let r = kernel_matrix(&rows, &rows, &KernelSpec::Rbf { gamma: 0.125 });
        assert_eq!(g, r);
    }

    #[test]
    fn linear_kernel_is_dot_product() {
        let k = KernelSpec::Linear;
        assert_eq!(k.eval(&[1.0, 2.0, 3.0], &[4.0, -5.0, 6.0]), 12.0);
    }

    #[test]
    fn gram_matrices_are_symmetric_psd() {
        let rows = random_rows(12, 5, 3);
        for spec in [
            KernelSpec::Linear,
            KernelSpec::Rbf { gamma: 0.5 },
            KernelSpec::Gaussian { sigma: 2.0 },
        ] {
            let k = kernel_matrix(&rows, &rows, &spec);
            for i in 0..12 {
                for j in 0..12 {
                    assert_eq!(k[(i, j)], k[(j, i)]);
                }
            }
            let eig = nalgebra::SymmetricEigen::new(k);
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-8, "{spec:?}: min eigenvalue {min}");
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(KernelSpec::Rbf { gamma: 0.0 }.validate().is_err());
        assert!(KernelSpec::Rbf { gamma: f64::NAN }.validate().is_err());
        assert!(KernelSpec::Gaussian { sigma: -1.0 }.validate().is_err());
        assert!(KernelSpec::Linear.validate().is_ok());
    }
}
