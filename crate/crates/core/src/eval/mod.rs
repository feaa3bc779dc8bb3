//! Evaluation protocol: splits, novelty tasks, AUC, grid search, and the
//! leave-one-class-out benchmark.
//!
//! One deliberate protocol choice is worth calling out: validation sets
//! mirror test sets (normal *and* anomaly items), because grid search
//! selects hyperparameters by validation AUC and an AUC needs both sides.

mod auc;
mod benchmark;
mod grid;
mod project;
mod split;
mod task;

pub use auc::auc;
pub use benchmark::{
    evaluate_class, reconstruction_baseline, run_benchmark, BenchmarkReport, ClassEval, ReportRow,
};
pub use grid::{default_grid, fit_grid_point, grid_search, GridOutcome, GridPoint};
pub use project::{project_2d, Projection};
pub use split::{split_items, ClassSplit, SplitAssignment};
pub use task::{make_novelty_task, NoveltyTask};
