//! Deep SVDD with a soft-boundary objective.
//!
//! A small bias-free network maps latent vectors near a fixed center; the
//! radius and the weights are optimized alternately:
//!
//! ```text
//! min_{W, r}  r^2 + 1/(nu n) * sum_i max(0, ||phi(z_i) - c||^2 - r^2) + wd ||W||^2
//! ```
//!
//! For fixed weights the optimal `r^2` is the `(1 - nu)`-quantile of the
//! squared center distances, so each epoch applies that closed-form update
//! followed by one full-batch gradient step on the weights. The center `c`
//! is the mean of the initial network outputs and stays fixed; components
//! near zero are clamped away from it so the trivial all-zeros network is
//! never a solution.

use crate::error::{Error, Result};
use crate::rng::{self, stream_rng};
use rand::Rng;

const SLOPE: f64 = 0.01;
const WEIGHT_DECAY: f64 = 1e-6;
const CENTER_CLAMP: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct DeepSvddConfig {
    pub nu: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Hidden and output widths; `None` halves the input dimension three
    /// times.
    pub widths: Option<Vec<usize>>,
    pub seed: u64,
}

impl Default for DeepSvddConfig {
    fn default() -> Self {
        DeepSvddConfig {
            nu: 0.1,
            epochs: 150,
            learning_rate: 1e-3,
            widths: None,
            seed: 0,
        }
    }
}

impl DeepSvddConfig {
    fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::Degenerate(format!(
                "nu must lie in (0, 1], got {}",
                self.nu
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Degenerate("learning rate must be positive".into()));
        }
        if let Some(w) = &self.widths {
            if w.is_empty() || w.iter().any(|&x| x == 0) {
                return Err(Error::Degenerate("layer widths must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DeepSvddModel {
    pub(crate) input_dim: usize,
    pub(crate) widths: Vec<usize>,
    /// Row-major `widths[l] x in_l` weight matrices.
    pub(crate) weights: Vec<Vec<f64>>,
    pub(crate) center: Vec<f64>,
    pub(crate) radius: f64,
    pub(crate) nu: f64,
}

impl DeepSvddModel {
    pub fn dim(&self) -> usize {
        self.input_dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub(crate) fn forward(&self, z: &[f64]) -> Vec<f64> {
        forward(&self.weights, self.input_dim, &self.widths, z)
    }
}

fn layer_dims(input_dim: usize, widths: &[usize]) -> Vec<(usize, usize)> {
    let mut dims = Vec::with_capacity(widths.len());
    let mut fan_in = input_dim;
    for &w in widths {
        dims.push((w, fan_in));
        fan_in = w;
    }
    dims
}

fn forward(weights: &[Vec<f64>], input_dim: usize, widths: &[usize], z: &[f64]) -> Vec<f64> {
    debug_assert_eq!(z.len(), input_dim);
    let mut x = z.to_vec();
    for (w, &(rows, cols)) in weights.iter().zip(&layer_dims(input_dim, widths)) {
        let mut y = vec![0.0; rows];
        for r in 0..rows {
            let mut acc = 0.0;
            for c in 0..cols {
                acc += w[r * cols + c] * x[c];
            }
            y[r] = if acc > 0.0 { acc } else { SLOPE * acc };
        }
        x = y;
    }
    x
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Optimal squared radius for fixed weights: the `(1 - nu)`-quantile of
/// the squared distances, taken over the sorted values.
pub(crate) fn quantile_radius_sq(dists_sq: &[f64], nu: f64) -> f64 {
    let mut sorted = dists_sq.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let idx = (((1.0 - nu) * n as f64).ceil() as isize - 1).clamp(0, n as isize - 1) as usize;
    sorted[idx]
}

/// Objective value and weight gradient with the radius and center held
/// fixed.
pub(crate) fn objective_and_grad(
    weights: &[Vec<f64>],
    input_dim: usize,
    widths: &[usize],
    rows: &[Vec<f64>],
    center: &[f64],
    r_sq: f64,
    nu: f64,
) -> (f64, Vec<Vec<f64>>) {
    let n = rows.len();
    let dims = layer_dims(input_dim, widths);
    let mut grads: Vec<Vec<f64>> = weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let hinge_scale = 1.0 / (nu * n as f64);
    let mut loss = r_sq;

    for z in rows {
        // Forward pass keeping the input of every layer.
        let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(dims.len());
        let mut x = z.clone();
        for (w, &(rows_l, cols_l)) in weights.iter().zip(&dims) {
            inputs.push(x.clone());
            let mut y = vec![0.0; rows_l];
            for r in 0..rows_l {
                let mut acc = 0.0;
                for c in 0..cols_l {
                    acc += w[r * cols_l + c] * x[c];
                }
                y[r] = if acc > 0.0 { acc } else { SLOPE * acc };
            }
            x = y;
        }
        let dist_sq = sq_dist(&x, center);
        let excess = dist_sq - r_sq;
        if excess <= 0.0 {
            continue;
        }
        loss += hinge_scale * excess;

        let mut dy: Vec<f64> = x
            .iter()
            .zip(center)
            .map(|(o, c)| hinge_scale * 2.0 * (o - c))
            .collect();
        for l in (0..dims.len()).rev() {
            let (rows_l, cols_l) = dims[l];
            let x_l = &inputs[l];
            let mut dx = vec![0.0; cols_l];
            for r in 0..rows_l {
                let mut pre = 0.0;
                for c in 0..cols_l {
                    pre += weights[l][r * cols_l + c] * x_l[c];
                }
                let slope = if pre > 0.0 { 1.0 } else { SLOPE };
                let dpre = dy[r] * slope;
                if dpre == 0.0 {
                    continue;
                }
                for c in 0..cols_l {
                    grads[l][r * cols_l + c] += dpre * x_l[c];
                    dx[c] += weights[l][r * cols_l + c] * dpre;
                }
            }
            dy = dx;
        }
    }

    for (g, w) in grads.iter_mut().zip(weights) {
        for (gi, wi) in g.iter_mut().zip(w) {
            *gi += 2.0 * WEIGHT_DECAY * wi;
            loss += WEIGHT_DECAY * wi * wi;
        }
    }
    (loss, grads)
}

pub fn fit_deepsvdd(rows: &[Vec<f64>], config: &DeepSvddConfig) -> Result<DeepSvddModel> {
    config.validate()?;
    let n = rows.len();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 training vectors, got {n}"
        )));
    }
    let d = rows[0].len();
    if d == 0 {
        return Err(Error::Degenerate("zero-dimensional training vectors".into()));
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

    let widths = config
        .widths
        .clone()
        .unwrap_or_else(|| vec![(d / 2).max(1), (d / 4).max(1), (d / 8).max(1)]);
    let dims = layer_dims(d, &widths);

    let mut rng = stream_rng(config.seed, &[rng::stream::TRAIN_INIT]);
    let mut weights: Vec<Vec<f64>> = dims
        .iter()
        .map(|&(rows_l, cols_l)| {
            let limit = (6.0 / (rows_l + cols_l) as f64).sqrt();
            (0..rows_l * cols_l)
                .map(|_| rng.random_range(-limit..limit))
                .collect()
        })
        .collect();

    let out_dim = *widths.last().unwrap();
    let mut center = vec![0.0; out_dim];
    for z in rows {
        for (c, o) in center.iter_mut().zip(forward(&weights, d, &widths, z)) {
            *c += o;
        }
    }
    for c in &mut center {
        *c /= n as f64;
        if c.abs() < CENTER_CLAMP {
            *c = if *c < 0.0 { -CENTER_CLAMP } else { CENTER_CLAMP };
        }
    }

    for epoch in 0..config.epochs {
        let dists_sq: Vec<f64> = rows
            .iter()
            .map(|z| sq_dist(&forward(&weights, d, &widths, z), &center))
            .collect();
        let r_sq = quantile_radius_sq(&dists_sq, config.nu);
        let (loss, grads) = objective_and_grad(&weights, d, &widths, rows, &center, r_sq, config.nu);
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("deep SVDD epoch {}", epoch + 1)));
        }
        for (w, g) in weights.iter_mut().zip(&grads) {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi -= config.learning_rate * gi;
            }
        }
        log::debug!("deep SVDD epoch {}/{}: loss {loss:.6}", epoch + 1, config.epochs);
    }
    // Refit the radius to the final weights so the stored boundary matches
    // the network that ships with it.
    let dists_sq: Vec<f64> = rows
        .iter()
        .map(|z| sq_dist(&forward(&weights, d, &widths, z), &center))
        .collect();
    let r_sq = quantile_radius_sq(&dists_sq, config.nu);
    if weights.iter().flatten().any(|w| !w.is_finite()) || !r_sq.is_finite() {
        return Err(Error::NonFinite("deep SVDD diverged".into()));
    }

    Ok(DeepSvddModel {
        input_dim: d,
        widths,
        weights,
        center,
        radius: r_sq.sqrt(),
        nu: config.nu,
    })
}

/// Signed anomaly score: negative inside the sphere, positive outside.
pub fn score_deepsvdd(model: &DeepSvddModel, z: &[f64]) -> f64 {
    let out = model.forward(z);
    sq_dist(&out, &model.center) - model.radius * model.radius
}
