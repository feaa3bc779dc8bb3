//! One-class classifiers over latent vectors.
//!
//! Four model families share a single scoring contract: higher scores are
//! more anomalous, and zero marks each model's own decision boundary where
//! it has one. [`OneClassModel`] wraps them behind one enum so callers can
//! fit, score, and serialize without caring which family is inside.

mod gods;
mod kernel;
mod kpca;
mod model;
mod ocsvm;
mod svdd;

pub use gods::{fit_gods, score_gods, GodsConfig, GodsModel};
pub use kernel::{kernel_matrix, KernelSpec};
pub use kpca::{fit_kpcand, score_kpcand, KpcaNdModel};
pub use model::{load_model, save_model, ClassifierKind, OneClassModel};
pub use ocsvm::{fit_ocsvm, score_ocsvm, OcSvmModel};
pub use svdd::{fit_deepsvdd, score_deepsvdd, DeepSvddConfig, DeepSvddModel};
