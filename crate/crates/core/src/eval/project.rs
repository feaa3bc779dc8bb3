//! 2D principal-component projection of a latent bank.

use crate::error::{Error, Result};
use crate::io::LatentBank;
use nalgebra::DMatrix;

#[derive(Clone, Debug)]
pub struct Projection {
    pub ids: Vec<String>,
    pub labels: Vec<String>,
    pub coords: Vec<[f64; 2]>,
    /// Population covariance eigenvalues of the two kept axes.
    pub eigenvalues: [f64; 2],
}

/// Mean-centers the bank rows and projects onto the two leading
/// covariance eigenvectors. Sign convention: each eigenvector's
/// largest-magnitude component is positive, so the output is unique.
pub fn project_2d(bank: &LatentBank) -> Result<Projection> {
    let n = bank.len();
    let d = bank.dim();
    if n < 3 {
        return Err(Error::Degenerate(format!(
            "projection needs at least 3 items, bank has {n}"
        )));
    }

    let rows: Vec<Vec<f64>> = (0..n).map(|i| bank.row_f64(i)).collect();
    let mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let cov = DMatrix::from_fn(d, d, |a, b| {
        rows.iter()
            .map(|r| (r[a] - mean[a]) * (r[b] - mean[b]))
            .sum::<f64>()
            / n as f64
    });
    let eig = nalgebra::SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let lead = eig.eigenvalues[order[0]];
    let second = if d >= 2 { eig.eigenvalues[order[1]] } else { 0.0 };
    if second <= 1e-12 * lead.max(1e-300) {
        return Err(Error::Degenerate("rank < 2".into()));
    }

    let mut axes = Vec::with_capacity(2);
    for &idx in order.iter().take(2) {
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let mut pivot = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        if v[pivot] < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
        axes.push(v);
    }

    let coords = rows
        .iter()
        .map(|r| {
            let mut c = [0.0; 2];
            for (k, axis) in axes.iter().enumerate() {
                c[k] = r
                    .iter()
                    .zip(axis)
                    .zip(&mean)
                    .map(|((x, a), m)| (x - m) * a)
                    .sum();
            }
            c
        })
        .collect();

    Ok(Projection {
        ids: bank.ids().to_vec(),
        labels: bank.labels().to_vec(),
        coords,
        eigenvalues: [lead, second],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn bank_from_rows(rows: &[Vec<f64>]) -> LatentBank {
        let mut bank = LatentBank::new(rows[0].len(), 1);
        for (i, r) in rows.iter().enumerate() {
            bank.push(&format!("item_{i:03}"), "c", r).unwrap();
        }
        bank
    }

    #[test]
    fn output_covers_every_item() {
        let mut rng = stream_rng(0, &[89]);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let p = project_2d(&bank_from_rows(&rows)).unwrap();
        assert_eq!(p.coords.len(), 20);
        assert_eq!(p.ids.len(), 20);
    }

    #[test]
    fn projected_variances_match_eigenvalue_oracle() {
        let mut rng = stream_rng(1, &[90]);
        // Anisotropic data: x stretched 5x, y 2x.
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| {
                vec![
                    5.0 * rng.random_range(-1.0..1.0),
                    2.0 * rng.random_range(-1.0..1.0),
                    0.3 * rng.random_range(-1.0..1.0),
                ]
            })
            .collect();
        let p = project_2d(&bank_from_rows(&rows)).unwrap();
        for k in 0..2 {
            let mean: f64 = p.coords.iter().map(|c| c[k]).sum::<f64>() / 200.0;
            let var: f64 = p.coords.iter().map(|c| (c[k] - mean) * (c[k] - mean)).sum::<f64>() / 200.0;
            assert!(
                (var - p.eigenvalues[k]).abs() < 1e-8 * p.eigenvalues[k],
                "axis {k}: variance {var} vs eigenvalue {}",
                p.eigenvalues[k]
            );
        }
        assert!(p.eigenvalues[0] > p.eigenvalues[1]);
    }

    #[test]
    fn collinear_bank_is_rank_deficient() {
        let rows: Vec<Vec<f64>> = (0..3).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let err = project_2d(&bank_from_rows(&rows)).unwrap_err();
        assert!(err.to_string().contains("rank < 2"), "{err}");
    }

    #[test]
    fn too_few_items_rejected() {
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(project_2d(&bank_from_rows(&rows)).is_err());
    }

    #[test]
    fn deterministic_including_sign() {
        let mut rng = stream_rng(2, &[91]);
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let bank = bank_from_rows(&rows);
        let a = project_2d(&bank).unwrap();
        let b = project_2d(&bank).unwrap();
        assert_eq!(a.coords, b.coords);
    }
}
