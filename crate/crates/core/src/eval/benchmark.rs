//! Leave-one-class-out benchmark orchestration and report rendering.

use super::auc::auc;
use super::grid::{default_grid, grid_search, GridPoint};
use super::split::split_items;
use super::task::{make_novelty_task, NoveltyTask};
use crate::autoencoder::{forward_diagnostics, AutoencoderParams};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::io::LatentBank;
use crate::one_class::ClassifierKind;
use crate::rng::{self, derive_seed, fnv1a};
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct ReportRow {
    pub anomaly_class: String,
    /// Test AUC per classifier kind, in report kind order.
    pub aucs: Vec<f64>,
    pub baseline: Option<f64>,
}

/// The per-class x per-classifier AUC matrix plus averages and run
/// metadata (extractor fingerprint, seed, chosen hyperparameters).
#[derive(Clone, Debug)]
pub struct BenchmarkReport {
    pub kinds: Vec<ClassifierKind>,
    pub rows: Vec<ReportRow>,
    pub averages: Vec<f64>,
    pub baseline_average: Option<f64>,
    pub metadata: Vec<(String, String)>,
}

/// Reconstruction losses of raw clouds under a frozen autoencoder, keyed
/// by item id: the classical baseline anomaly score.
pub fn reconstruction_baseline(
    params: &AutoencoderParams,
    items: &[(String, PointCloud)],
) -> Result<BTreeMap<String, f64>> {
    let scored: Vec<(String, f64)> = items
        .par_iter()
        .map(|(id, cloud)| {
            forward_diagnostics(params, cloud).map(|eval| (id.clone(), eval.loss))
        })
        .collect::<Result<_>>()?;
    Ok(scored.into_iter().collect())
}

/// One leave-one-class-out task evaluated end to end.
#[derive(Clone, Debug)]
pub struct ClassEval {
    pub task: NoveltyTask,
    /// Winning grid point with its validation AUC, per requested kind.
    pub chosen: Vec<(GridPoint, f64)>,
    /// Test AUC per requested kind.
    pub test_aucs: Vec<f64>,
}

/// Evaluates a single anomaly class: splits the bank's items, builds the
/// task, grid-searches each kind on validation, and reports test AUCs.
/// [`run_benchmark`] repeats this for every class, so a standalone
/// evaluation of one class reproduces the matching benchmark row exactly.
pub fn evaluate_class(
    bank: &LatentBank,
    kinds: &[ClassifierKind],
    anomaly_class: &str,
    seed: u64,
) -> Result<ClassEval> {
    if kinds.is_empty() {
        return Err(Error::Degenerate("no classifier kinds requested".into()));
    }
    let items: Vec<(String, String)> = bank
        .ids()
        .iter()
        .zip(bank.labels())
        .map(|(id, label)| (id.clone(), label.clone()))
        .collect();
    let splits = split_items(&items, seed)?;
    let task = make_novelty_task(&splits, anomaly_class)?;

    let index_of = |id: &str| -> Result<usize> {
        bank.index_of(id)
            .ok_or_else(|| Error::Degenerate(format!("item {id:?} missing from bank")))
    };
    // The whole protocol is meaningless if anomaly items leak into
    // training, so this is a hard runtime check, not a debug assert.
    for id in &task.train {
        let idx = index_of(id)?;
        assert_ne!(
            &bank.labels()[idx], anomaly_class,
            "anomaly-class item {id:?} leaked into the training set"
        );
    }

    let train_rows: Vec<Vec<f64>> = task
        .train
        .iter()
        .map(|id| Ok(bank.row_f64(index_of(id)?)))
        .collect::<Result<_>>()?;
    let validation: Vec<(Vec<f64>, bool)> = task
        .validation
        .iter()
        .map(|(id, a)| Ok((bank.row_f64(index_of(id)?), *a)))
        .collect::<Result<_>>()?;
    let test: Vec<(Vec<f64>, bool)> = task
        .test
        .iter()
        .map(|(id, a)| Ok((bank.row_f64(index_of(id)?), *a)))
        .collect::<Result<_>>()?;

    let class_hash = fnv1a(anomaly_class.as_bytes());
    let mut chosen = Vec::with_capacity(kinds.len());
    let mut test_aucs = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let kind_word = ClassifierKind::ALL
            .iter()
            .position(|k| k == kind)
            .expect("kind is one of ALL") as u64;
        let grid = default_grid(*kind, &train_rows);
        let outcome = grid_search(&train_rows, &validation, &grid, |gi| {
            derive_seed(seed, &[rng::stream::FIT, class_hash, kind_word, gi as u64])
        })
        .map_err(|e| Error::Solver(format!("anomaly class {anomaly_class:?}, {kind}: {e}")))?;

        let mut normal = Vec::new();
        let mut anomalous = Vec::new();
        for (row, is_anomaly) in &test {
            let s = outcome.model.score(row);
            if *is_anomaly {
                anomalous.push(s);
            } else {
                normal.push(s);
            }
        }
        let test_auc = auc(&normal, &anomalous)
            .map_err(|e| Error::Solver(format!("anomaly class {anomaly_class:?}, {kind}: {e}")))?;
        chosen.push((outcome.point, outcome.validation_auc));
        test_aucs.push(test_auc);
    }
    Ok(ClassEval {
        task,
        chosen,
        test_aucs,
    })
}

/// Runs every class as the anomaly in turn: split, task construction,
/// per-kind grid search on validation, test AUC. `baseline` optionally
/// supplies a per-item anomaly score (for example reconstruction loss)
/// reported as an extra column under the same protocol.
pub fn run_benchmark(
    bank: &LatentBank,
    kinds: &[ClassifierKind],
    seed: u64,
    baseline: Option<&BTreeMap<String, f64>>,
) -> Result<BenchmarkReport> {
    if kinds.is_empty() {
        return Err(Error::Degenerate("no classifier kinds requested".into()));
    }
    let classes = bank.classes();
    if classes.len() < 2 {
        return Err(Error::Degenerate(format!(
            "benchmark needs at least 2 classes, bank has {}",
            classes.len()
        )));
    }

    let baseline_of = |id: &str| -> Result<f64> {
        let map = baseline.expect("caller checked");
        map.get(id)
            .copied()
            .ok_or_else(|| Error::Degenerate(format!("item {id:?} missing from baseline scores")))
    };

    let mut metadata = vec![
        (
            "extractor fingerprint".to_string(),
            format!("{:016x}", bank.fingerprint()),
        ),
        ("seed".to_string(), seed.to_string()),
        (
            "classifiers".to_string(),
            kinds
                .iter()
                .map(|k| k.name())
                .collect::<Vec<_>>()
                .join(","),
        ),
    ];

    let mut rows = Vec::with_capacity(classes.len());
    for class in &classes {
        let eval = evaluate_class(bank, kinds, class, seed)?;
        for (kind, (point, validation_auc)) in kinds.iter().zip(&eval.chosen) {
            metadata.push((
                format!("params {class} {kind}"),
                format!("{point} (validation AUC {validation_auc:.3})"),
            ));
        }

        let baseline_auc = if baseline.is_some() {
            let mut normal = Vec::new();
            let mut anomalous = Vec::new();
            for (id, is_anomaly) in &eval.task.test {
                let s = baseline_of(id)?;
                if *is_anomaly {
                    anomalous.push(s);
                } else {
                    normal.push(s);
                }
            }
            Some(
                auc(&normal, &anomalous).map_err(|e| {
                    Error::Solver(format!("anomaly class {class:?}, baseline: {e}"))
                })?,
            )
        } else {
            None
        };

        rows.push(ReportRow {
            anomaly_class: class.clone(),
            aucs: eval.test_aucs,
            baseline: baseline_auc,
        });
    }

    let averages: Vec<f64> = (0..kinds.len())
        .map(|k| rows.iter().map(|r| r.aucs[k]).sum::<f64>() / rows.len() as f64)
        .collect();
    let baseline_average = baseline.map(|_| {
        rows.iter().map(|r| r.baseline.unwrap_or(0.0)).sum::<f64>() / rows.len() as f64
    });

    Ok(BenchmarkReport {
        kinds: kinds.to_vec(),
        rows,
        averages,
        baseline_average,
        metadata,
    })
}

impl BenchmarkReport {
    fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.kinds.iter().map(|k| k.name().to_string()).collect();
        if self.baseline_average.is_some() {
            names.push("baseline".to_string());
        }
        names
    }

    fn row_values(&self, row: &ReportRow) -> Vec<f64> {
        let mut values = row.aucs.clone();
        if let Some(b) = row.baseline {
            values.push(b);
        }
        values
    }

    fn average_values(&self) -> Vec<f64> {
        let mut values = self.averages.clone();
        if let Some(b) = self.baseline_average {
            values.push(b);
        }
        values
    }

    /// Aligned-column text: metadata as comments, one row per anomaly
    /// class, a trailing average row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            out.push_str(&format!("# {key}: {value}\n"));
        }
        out.push_str("# higher score = more anomalous\n");

        let label_width = self
            .rows
            .iter()
            .map(|r| r.anomaly_class.len())
            .chain(["anomaly".len(), "average".len()])
            .max()
            .unwrap_or(7);
        let names = self.column_names();
        out.push_str(&format!("{:<label_width$}", "anomaly"));
        for name in &names {
            out.push_str(&format!("  {name:>8}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:<label_width$}", row.anomaly_class));
            for v in self.row_values(row) {
                out.push_str(&format!("  {v:>8.3}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<label_width$}", "average"));
        for v in self.average_values() {
            out.push_str(&format!("  {v:>8.3}"));
        }
        out.push('\n');
        out
    }

    /// Machine-readable CSV with '#' comments and six-digit AUCs.
    pub fn to_delimited(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            out.push_str(&format!("# {}={}\n", key.replace(' ', "_"), value));
        }
        out.push_str("# higher_score=more_anomalous\n");
        out.push_str("anomaly_class");
        for name in self.column_names() {
            out.push(',');
            out.push_str(&name);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.anomaly_class);
            for v in self.row_values(row) {
                out.push_str(&format!(",{v:.6}"));
            }
            out.push('\n');
        }
        out.push_str("average");
        for v in self.average_values() {
            out.push_str(&format!(",{v:.6}"));
        }
        out.push('\n');
        out
    }
}
