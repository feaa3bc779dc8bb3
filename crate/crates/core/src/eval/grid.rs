//! Hyperparameter grids and validation-AUC grid search.

use super::auc::auc;
use crate::error::{Error, Result};
use crate::one_class::{
    fit_deepsvdd, fit_gods, fit_kpcand, fit_ocsvm, ClassifierKind, DeepSvddConfig, GodsConfig,
    KernelSpec, OneClassModel,
};
use std::fmt;

/// One candidate hyperparameter assignment for one classifier kind.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridPoint {
    OcSvm { nu: f64, gamma: f64 },
    KpcaNd { sigma: f64, q: usize },
    DeepSvdd { nu: f64, epochs: usize },
    Gods { eta: f64, lambda: f64, m: usize },
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridPoint::OcSvm { nu, gamma } => write!(f, "nu={nu} gamma={gamma}"),
            GridPoint::KpcaNd { sigma, q } => write!(f, "sigma={sigma} q={q}"),
            GridPoint::DeepSvdd { nu, epochs } => write!(f, "nu={nu} epochs={epochs}"),
            GridPoint::Gods { eta, lambda, m } => {
                write!(f, "eta={eta} lambda={lambda} m={m}")
            }
        }
    }
}

/// Lower median of all pairwise Euclidean distances; the length scale for
/// the KPCA-ND sigma grid.
fn median_pairwise_distance(rows: &[Vec<f64>]) -> f64 {
    let mut dists = Vec::with_capacity(rows.len() * (rows.len() - 1) / 2);
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let d: f64 = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dists.push(d.sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = dists.get((dists.len().saturating_sub(1)) / 2).copied().unwrap_or(1.0);
    median.max(1e-6)
}

/// The default search grid for a kind, shaped by the training set (there
/// are data-dependent clamps: KPCA-ND component counts stay below the
/// sample count and GODS plane counts below the latent dimension).
pub fn default_grid(kind: ClassifierKind, train: &[Vec<f64>]) -> Vec<GridPoint> {
    let n = train.len();
    let d = train.first().map_or(0, Vec::len);
    match kind {
        ClassifierKind::OcSvm => {
            let mut grid = Vec::with_capacity(65);
            for nu in [0.01, 0.05, 0.1, 0.2, 0.5] {
                for exp in -9..=3 {
                    grid.push(GridPoint::OcSvm {
                        nu,
                        gamma: (2.0f64).powi(exp),
                    });
                }
            }
            grid
        }
        ClassifierKind::KpcaNd => {
            let scale = median_pairwise_distance(train);
            let mut grid = Vec::new();
            for factor in [0.5, 1.0, 2.0, 4.0, 8.0] {
                for q in [8usize, 16, 32, 64, 128] {
                    let clamped = q.min(n.saturating_sub(1)).max(1);
                    let point = GridPoint::KpcaNd {
                        sigma: factor * scale,
                        q: clamped,
                    };
                    if !grid.contains(&point) {
                        grid.push(point);
                    }
                }
            }
            grid
        }
        ClassifierKind::DeepSvdd => {
            let mut grid = Vec::with_capacity(6);
            for nu in [0.05, 0.1, 0.2] {
                for epochs in [50usize, 150] {
                    grid.push(GridPoint::DeepSvdd { nu, epochs });
                }
            }
            grid
        }
        ClassifierKind::Gods => {
            let mut grid = Vec::new();
            for eta in [0.1, 1.0, 10.0] {
                for lambda in [1e-3, 1e-2] {
                    for m in [2usize, 5, 10] {
                        let clamped = m.min(d).max(1);
                        let point = GridPoint::Gods {
                            eta,
                            lambda,
                            m: clamped,
                        };
                        if !grid.contains(&point) {
                            grid.push(point);
                        }
                    }
                }
            }
            grid
        }
    }
}

pub fn fit_grid_point(point: &GridPoint, train: &[Vec<f64>], seed: u64) -> Result<OneClassModel> {
    match *point {
        GridPoint::OcSvm { nu, gamma } => {
            fit_ocsvm(train, nu, KernelSpec::Rbf { gamma }).map(OneClassModel::OcSvm)
        }
        GridPoint::KpcaNd { sigma, q } => {
            fit_kpcand(train, KernelSpec::Gaussian { sigma }, q).map(OneClassModel::KpcaNd)
        }
        GridPoint::DeepSvdd { nu, epochs } => fit_deepsvdd(
            train,
            &DeepSvddConfig {
                nu,
                epochs,
                seed,
                ..Default::default()
            },
        )
        .map(OneClassModel::DeepSvdd),
        GridPoint::Gods { eta, lambda, m } => fit_gods(
            train,
            &GodsConfig {
                m,
                eta,
                lambda,
                seed,
                ..Default::default()
            },
        )
        .map(OneClassModel::Gods),
    }
}

/// The winning grid point with its fitted model and validation AUC.
#[derive(Clone, Debug)]
pub struct GridOutcome {
    pub point: GridPoint,
    pub validation_auc: f64,
    pub model: OneClassModel,
}

/// Fits every grid point on the training rows, scores the validation
/// items, and returns the best by validation AUC (strict improvement, so
/// ties go to the earliest point in declaration order). Individual fit
/// failures are tolerated; only an all-fail grid is an error.
pub fn grid_search(
    train: &[Vec<f64>],
    validation: &[(Vec<f64>, bool)],
    grid: &[GridPoint],
    fit_seed: impl Fn(usize) -> u64,
) -> Result<GridOutcome> {
    if grid.is_empty() {
        return Err(Error::Degenerate("empty hyperparameter grid".into()));
    }
    let mut best: Option<GridOutcome> = None;
    let mut failures: Vec<String> = Vec::new();
    for (gi, point) in grid.iter().enumerate() {
        let model = match fit_grid_point(point, train, fit_seed(gi)) {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("{point}: {e}"));
                continue;
            }
        };
        let mut normal = Vec::new();
        let mut anomalous = Vec::new();
        for (row, is_anomaly) in validation {
            let s = model.score(row);
            if *is_anomaly {
                anomalous.push(s);
            } else {
                normal.push(s);
            }
        }
        let validation_auc = match auc(&normal, &anomalous) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("{point}: {e}"));
                continue;
            }
        };
        if best.as_ref().is_none_or(|b| validation_auc > b.validation_auc) {
            best = Some(GridOutcome {
                point: *point,
                validation_auc,
                model,
            });
        }
    }
    best.ok_or_else(|| {
        Error::Solver(format!(
            "all {} grid points failed: [{}]",
            grid.len(),
            failures.join("; ")
        ))
    })
}
