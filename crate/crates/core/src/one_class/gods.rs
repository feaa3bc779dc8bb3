//! GODS: generalized one-class discriminative subspaces.
//!
//! Two orthonormal frames `W1`, `W2` (with offsets `b1`, `b2`) sandwich
//! the training data between a pair of hyperplane arrangements:
//!
//! ```text
//! J = ||W1 - W2||_F^2
//!   + eta/n * sum_i [ max(0, 1 - min_j(w1_j'z_i + b1_j))^2
//!                   + max(0, 1 + max_j(w2_j'z_i + b2_j))^2 ]
//! ```
//!
//! Offsets start at the tightest slab containing the data, so the initial
//! hinges are all zero and optimization only widens the slab while pulling
//! the two frames toward each other. Frames take plain gradient steps
//! followed by a QR retraction back onto the Stiefel manifold; offsets
//! take plain gradient steps.

use crate::error::{Error, Result};
use crate::rng::{self, stream_rng};
use nalgebra::DMatrix;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct GodsConfig {
    /// Hyperplanes per frame.
    pub m: usize,
    /// Hinge weight in the objective.
    pub eta: f64,
    /// Gradient step size.
    pub lambda: f64,
    pub iters: usize,
    pub seed: u64,
}

impl Default for GodsConfig {
    fn default() -> Self {
        GodsConfig {
            m: 5,
            eta: 1.0,
            lambda: 1e-2,
            iters: 300,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GodsModel {
    /// `d x m`, orthonormal columns.
    pub(crate) w1: DMatrix<f64>,
    pub(crate) w2: DMatrix<f64>,
    pub(crate) b1: Vec<f64>,
    pub(crate) b2: Vec<f64>,
    pub(crate) eta: f64,
}

impl GodsModel {
    pub fn dim(&self) -> usize {
        self.w1.nrows()
    }

    pub fn planes(&self) -> usize {
        self.w1.ncols()
    }
}

/// Thin QR with the usual sign fix so the factorization is unique: the
/// diagonal of R is kept non-negative.
fn retract(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.ncols();
    let qr = a.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).apply(|v| *v = -*v);
        }
    }
    q
}

fn min_plane(w: &DMatrix<f64>, b: &[f64], z: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for j in 0..w.ncols() {
        let p: f64 = w.column(j).iter().zip(z).map(|(a, x)| a * x).sum::<f64>() + b[j];
        if p < best.1 {
            best = (j, p);
        }
    }
    best
}

fn max_plane(w: &DMatrix<f64>, b: &[f64], z: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for j in 0..w.ncols() {
        let p: f64 = w.column(j).iter().zip(z).map(|(a, x)| a * x).sum::<f64>() + b[j];
        if p > best.1 {
            best = (j, p);
        }
    }
    best
}

pub fn fit_gods(rows: &[Vec<f64>], config: &GodsConfig) -> Result<GodsModel> {
    if rows.is_empty() {
        return Err(Error::Degenerate("need at least 1 training vector".into()));
    }
    let d = rows[0].len();
    if d == 0 {
        return Err(Error::Degenerate("zero-dimensional training vectors".into()));
    }
    if config.m < 1 || config.m > d {
        return Err(Error::Degenerate(format!(
            "plane count must lie in 1..={d}, got {}",
            config.m
        )));
    }
    if !(config.eta > 0.0 && config.eta.is_finite()) {
        return Err(Error::Degenerate("eta must be positive".into()));
    }
    if !(config.lambda > 0.0 && config.lambda.is_finite()) {
        return Err(Error::Degenerate("lambda must be positive".into()));
    }
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

    let n = rows.len();
    let m = config.m;
    let mut rng = stream_rng(config.seed, &[rng::stream::TRAIN_INIT]);
    let mut draw = || DMatrix::from_fn(d, m, |_, _| rng.random_range(-1.0..1.0));
    let first = draw();
    let second = draw();
    let mut w1 = retract(&first);
    let mut w2 = retract(&second);

    // Tightest initial slab: every projection starts exactly on its margin.
    let proj_extreme = |w: &DMatrix<f64>, j: usize, max: bool| -> f64 {
        rows.iter()
            .map(|z| w.column(j).iter().zip(z).map(|(a, x)| a * x).sum::<f64>())
            .fold(if max { f64::NEG_INFINITY } else { f64::INFINITY }, |acc, p| {
                if max {
                    acc.max(p)
                } else {
                    acc.min(p)
                }
            })
    };
    let mut b1: Vec<f64> = (0..m).map(|j| 1.0 - proj_extreme(&w1, j, false)).collect();
    let mut b2: Vec<f64> = (0..m).map(|j| -1.0 - proj_extreme(&w2, j, true)).collect();

    let hinge_scale = 2.0 * config.eta / n as f64;
    for _ in 0..config.iters {
        let mut gw1 = DMatrix::from_fn(d, m, |r, c| 2.0 * (w1[(r, c)] - w2[(r, c)]));
        let mut gw2 = -gw1.clone();
        let mut gb1 = vec![0.0; m];
        let mut gb2 = vec![0.0; m];
        for z in rows {
            let (j1, v1) = min_plane(&w1, &b1, z);
            let h1 = (1.0 - v1).max(0.0);
            if h1 > 0.0 {
                for r in 0..d {
                    gw1[(r, j1)] -= hinge_scale * h1 * z[r];
                }
                gb1[j1] -= hinge_scale * h1;
            }
            let (j2, v2) = max_plane(&w2, &b2, z);
            let h2 = (1.0 + v2).max(0.0);
            if h2 > 0.0 {
                for r in 0..d {
                    gw2[(r, j2)] += hinge_scale * h2 * z[r];
                }
                gb2[j2] += hinge_scale * h2;
            }
        }
        let stepped1 = &w1 - &gw1 * config.lambda;
        let stepped2 = &w2 - &gw2 * config.lambda;
        w1 = retract(&stepped1);
        w2 = retract(&stepped2);
        for j in 0..m {
            b1[j] -= config.lambda * gb1[j];
            b2[j] -= config.lambda * gb2[j];
        }
    }

    if w1.iter().chain(w2.iter()).any(|v| !v.is_finite())
        || b1.iter().chain(b2.iter()).any(|v| !v.is_finite())
    {
        return Err(Error::NonFinite("GODS diverged".into()));
    }
    Ok(GodsModel {
        w1,
        w2,
        b1,
        b2,
        eta: config.eta,
    })
}

/// Zero inside the learned slab; grows linearly with the violation of
/// either boundary.
pub fn score_gods(model: &GodsModel, z: &[f64]) -> f64 {
    let (_, v1) = min_plane(&model.w1, &model.b1, z);
    let (_, v2) = max_plane(&model.w2, &model.b2, z);
    (1.0 - v1).max(0.0) + (1.0 + v2).max(0.0)
}
