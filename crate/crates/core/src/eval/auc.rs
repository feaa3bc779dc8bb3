//! Rank-based AUC.

use crate::error::{Error, Result};

/// Mann–Whitney AUC: the probability that a random anomaly outscores a
/// random normal sample, ties counting one half. Sorting plus binary
/// search keeps it O((n+m) log n) while summing exactly the same
/// half-integer credits as pairwise counting, so the result equals the
/// brute-force pair count bit for bit.
pub fn auc(scores_normal: &[f64], scores_anomaly: &[f64]) -> Result<f64> {
    if scores_normal.is_empty() {
        return Err(Error::Degenerate("no normal scores".into()));
    }
    if scores_anomaly.is_empty() {
        return Err(Error::Degenerate("no anomaly scores".into()));
    }
    if scores_normal
        .iter()
        .chain(scores_anomaly)
        .any(|s| !s.is_finite())
    {
        return Err(Error::NonFinite("AUC input".into()));
    }

    let mut sorted = scores_normal.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut credit = 0.0;
    for &a in scores_anomaly {
        let below = sorted.partition_point(|&s| s < a);
        let not_above = sorted.partition_point(|&s| s <= a);
        credit += below as f64 + 0.5 * (not_above - below) as f64;
    }
    Ok(credit / (scores_normal.len() as f64 * scores_anomaly.len() as f64))
}
