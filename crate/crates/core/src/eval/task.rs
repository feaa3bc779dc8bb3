//! Leave-one-class-out novelty task construction.

use super::split::SplitAssignment;
use crate::error::{Error, Result};

/// One novelty-detection problem: the anomaly class is excluded from
/// training entirely, while validation and test contain every class with
/// an anomaly tag per item.
#[derive(Clone, Debug)]
pub struct NoveltyTask {
    pub anomaly_class: String,
    pub normal_classes: Vec<String>,
    /// Item ids drawn from normal classes' train splits only.
    pub train: Vec<String>,
    /// `(item id, is_anomaly)` over all classes' validation splits.
    pub validation: Vec<(String, bool)>,
    /// `(item id, is_anomaly)` over all classes' test splits.
    pub test: Vec<(String, bool)>,
}

pub fn make_novelty_task(splits: &SplitAssignment, anomaly_class: &str) -> Result<NoveltyTask> {
    if !splits.per_class.contains_key(anomaly_class) {
        return Err(Error::UnknownClass {
            class: anomaly_class.to_string(),
            known: splits.classes(),
        });
    }
    let mut task = NoveltyTask {
        anomaly_class: anomaly_class.to_string(),
        normal_classes: Vec::new(),
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    for (class, split) in &splits.per_class {
        let is_anomaly = class == anomaly_class;
        if !is_anomaly {
            task.normal_classes.push(class.clone());
            task.train.extend(split.train.iter().cloned());
        }
        task.validation
            .extend(split.validation.iter().map(|id| (id.clone(), is_anomaly)));
        task.test
            .extend(split.test.iter().map(|id| (id.clone(), is_anomaly)));
    }
    Ok(task)
}
