//! One-class SVM fitted in the dual.
//!
//! The fit solves
//!
//! ```text
//! min_a  1/2 a' K a    s.t.  0 <= a_i <= 1/(nu n),  sum_i a_i = 1
//! ```
//!
//! with a maximal-violating-pair working-set solver: each step picks the
//! coordinate with the smallest gradient among those free to grow and the
//! one with the largest gradient among those free to shrink, then moves
//! mass between them along the equality constraint. Termination is on the
//! KKT gap `max_down g - min_up g`.

use super::kernel::{kernel_matrix, KernelSpec};
use crate::error::{Error, Result};

const KKT_TOL: f64 = 1e-8;
const ITER_CAP_PER_POINT: usize = 100_000;
/// Alphas below this are dropped from the support set.
const ALPHA_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct OcSvmModel {
    pub(crate) kernel: KernelSpec,
    pub(crate) support: Vec<Vec<f64>>,
    pub(crate) alpha: Vec<f64>,
    pub(crate) rho: f64,
    pub(crate) w_norm: f64,
}

impl OcSvmModel {
    pub fn dim(&self) -> usize {
        self.support.first().map_or(0, Vec::len)
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn w_norm(&self) -> f64 {
        self.w_norm
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    /// Support vectors (training rows with alpha above the numeric floor).
    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    /// Dual coefficients aligned with [`Self::support`].
    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }
}

fn check_rows(rows: &[Vec<f64>], min: usize) -> Result<usize> {
    if rows.len() < min {
        return Err(Error::Degenerate(format!(
            "need at least {min} training vectors, got {}",
            rows.len()
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
    Ok(d)
}

pub fn fit_ocsvm(rows: &[Vec<f64>], nu: f64, kernel: KernelSpec) -> Result<OcSvmModel> {
    kernel.validate()?;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Degenerate(format!("nu must lie in (0, 1], got {nu}")));
    }
    check_rows(rows, 2)?;
    let n = rows.len();
    let c = 1.0 / (nu * n as f64);
    let k = kernel_matrix(rows, rows, &kernel);

    // Feasible start: spread the unit of mass uniformly (respects the box
    // because c >= 1/n for nu <= 1).
    let mut alpha = vec![1.0 / n as f64; n];
    let mut g: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| k[(i, j)] * alpha[j]).sum())
        .collect();

    let cap = ITER_CAP_PER_POINT.saturating_mul(n);
    let mut gap = f64::INFINITY;
    let mut converged = false;
    for _ in 0..cap {
        let mut up: Option<usize> = None; // alpha < c, minimal gradient
        let mut down: Option<usize> = None; // alpha > 0, maximal gradient
        for i in 0..n {
            if alpha[i] < c && up.is_none_or(|u| g[i] < g[u]) {
                up = Some(i);
            }
            if alpha[i] > 0.0 && down.is_none_or(|d| g[i] > g[d]) {
                down = Some(i);
            }
        }
        let (i, j) = match (up, down) {
            (Some(i), Some(j)) => (i, j),
            // No direction is free to move: the box pins every coordinate
            // (nu = 1), so the single feasible point is the solution.
            _ => {
                converged = true;
                break;
            }
        };
        gap = g[j] - g[i];
        if gap <= KKT_TOL {
            converged = true;
            break;
        }
        // Move t units of mass from j to i; the quadratic along the
        // direction e_i - e_j has curvature eta.
        let eta = k[(i, i)] + k[(j, j)] - 2.0 * k[(i, j)];
        let mut t = if eta > 1e-12 { gap / eta } else { f64::INFINITY };
        t = t.min(c - alpha[i]).min(alpha[j]);
        if t <= 0.0 {
            break;
        }
        alpha[i] += t;
        alpha[j] -= t;
        for r in 0..n {
            g[r] += t * (k[(r, i)] - k[(r, j)]);
        }
    }
    if !converged {
        return Err(Error::Solver(format!(
            "one-class SVM did not reach KKT gap {KKT_TOL:.0e} within {cap} steps (gap {gap:.3e})"
        )));
    }

    // rho is the decision threshold: the common gradient value of the
    // strictly interior support vectors, or the midpoint of the KKT
    // bracket when none are interior.
    let interior: Vec<usize> = (0..n)
        .filter(|&i| alpha[i] > ALPHA_FLOOR && alpha[i] < c - ALPHA_FLOOR)
        .collect();
    let rho = if interior.is_empty() {
        let lo = (0..n)
            .filter(|&i| alpha[i] < c)
            .map(|i| g[i])
            .fold(f64::INFINITY, f64::min);
        let hi = (0..n)
            .filter(|&i| alpha[i] > 0.0)
            .map(|i| g[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            hi
        } else if !hi.is_finite() {
            lo
        } else {
            0.5 * (lo + hi)
        }
    } else {
        interior.iter().map(|&i| g[i]).sum::<f64>() / interior.len() as f64
    };

    let quad: f64 = (0..n).map(|i| alpha[i] * g[i]).sum();
    let w_norm = quad.max(0.0).sqrt();
    if w_norm < 1e-12 {
        return Err(Error::Degenerate(
            "one-class SVM collapsed to a zero-norm solution".into(),
        ));
    }

    let mut support = Vec::new();
    let mut sv_alpha = Vec::new();
    for i in 0..n {
        if alpha[i] > ALPHA_FLOOR {
            support.push(rows[i].clone());
            sv_alpha.push(alpha[i]);
        }
    }
    Ok(OcSvmModel {
        kernel,
        support,
        alpha: sv_alpha,
        rho,
        w_norm,
    })
}

/// Signed anomaly score: zero on the decision surface, positive outside.
pub fn score_ocsvm(model: &OcSvmModel, z: &[f64]) -> f64 {
    let proj: f64 = model
        .support
        .iter()
        .zip(&model.alpha)
        .map(|(x, a)| a * model.kernel.eval(x, z))
        .sum();
    (model.rho - proj) / model.w_norm
}
