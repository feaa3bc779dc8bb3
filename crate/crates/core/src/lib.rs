//! Point-cloud novelty detection toolkit.
//!
//! The pipeline has two halves. A *general feature extractor* — a graph-based
//! point-cloud autoencoder trained once on category-agnostic data (for example
//! self-generated fractal point clouds) — turns each cloud into a fixed-size
//! latent vector. *One-class classifiers* (kernel OC-SVM, kernel-PCA novelty
//! detection, a soft-boundary hypersphere network, and discriminative subspace
//! bounding) are then fitted on normal-class latents only and score test
//! latents, where a higher score always means more anomalous.
//!
//! Module map:
//! - [`geometry`]: point-cloud primitives, exact nearest neighbors, Chamfer
//!   distance and its gradient.
//! - [`fractal`]: iterated-function-system data generation with variance
//!   filtering and fractal-noise mixing.
//! - [`autoencoder`]: the folding autoencoder (forward, hand-derived backward,
//!   training, checkpointing).
//! - [`one_class`]: the four classifiers behind a unified scoring contract.
//! - [`eval`]: splits, leave-one-class-out task construction, AUC, grid
//!   search, and benchmark reports.
//! - [`io`]: file formats (XYZ/PCB point clouds, CSV manifests, latent banks).

pub mod autoencoder;
pub(crate) mod binio;
pub mod error;
pub mod eval;
pub mod fractal;
pub mod geometry;
pub mod io;
pub mod one_class;
pub mod rng;

pub use autoencoder::{ArchSpec, AutoencoderParams, LatentVector};
pub use error::{Error, Result};
pub use eval::{BenchmarkReport, NoveltyTask, SplitAssignment};
pub use fractal::{FractalConfig, IfsSystem};
pub use geometry::{NnIndex, PointCloud};
pub use io::{LatentBank, Manifest};
pub use one_class::{ClassifierKind, KernelSpec, OneClassModel};
