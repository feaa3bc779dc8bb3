//! Per-class train/validation/test splitting.

use crate::error::{Error, Result};
use crate::rng::{self, fnv1a, stream_rng};
use rand::seq::SliceRandom;
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassSplit {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

impl ClassSplit {
    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitAssignment {
    pub per_class: BTreeMap<String, ClassSplit>,
}

impl SplitAssignment {
    pub fn classes(&self) -> Vec<String> {
        self.per_class.keys().cloned().collect()
    }
}

/// Splits items 7:1:2 per class, floor-based, remainders to train then
/// test. Assignment is keyed by item id: each class's ids are sorted
/// before the seeded shuffle, so input order never changes the outcome.
pub fn split_items(items: &[(String, String)], seed: u64) -> Result<SplitAssignment> {
    let mut by_class: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (id, class) in items {
        by_class.entry(class).or_default().push(id);
    }

    let mut per_class = BTreeMap::new();
    for (class, mut ids) in by_class {
        let n = ids.len();
        if n < 3 {
            return Err(Error::ClassTooSmall {
                class: class.to_string(),
                count: n,
                need: 3,
            });
        }
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != n {
            return Err(Error::Degenerate(format!(
                "duplicate item ids in class {class:?}"
            )));
        }
        let mut rng = stream_rng(seed, &[rng::stream::SPLIT, fnv1a(class.as_bytes())]);
        ids.shuffle(&mut rng);

        let mut train_len = n * 7 / 10;
        let validation_len = n / 10;
        let mut test_len = n * 2 / 10;
        let remainder = n - train_len - validation_len - test_len;
        if remainder >= 1 {
            train_len += 1;
        }
        if remainder >= 2 {
            test_len += 1;
        }

        let to_owned = |ids: &[&str]| ids.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        per_class.insert(
            class.to_string(),
            ClassSplit {
                train: to_owned(&ids[..train_len]),
                validation: to_owned(&ids[train_len..train_len + validation_len]),
                test: to_owned(&ids[train_len + validation_len..]),
            },
        );
        debug_assert_eq!(
            per_class[class].test.len(),
            test_len,
            "allocation must cover the class"
        );
    }
    Ok(SplitAssignment { per_class })
}
