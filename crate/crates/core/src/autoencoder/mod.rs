//! Folding autoencoder over point clouds.
//!
//! The encoder lifts each point to a 12-d feature (position plus the local
//! covariance of its `knn_k + 1` neighborhood), runs a shared point MLP,
//! interleaves two graph max-pool stages, and collapses to a latent code
//! through a global max-pool and a two-layer head. The decoder folds a
//! square 2-d grid onto the target surface twice. Training minimizes the
//! summed Chamfer distance from the input to both folds with Adam; the
//! backward pass is exact reverse-mode differentiation with pool argmaxes
//! and Chamfer correspondences held fixed.

mod adam;
mod arch;
mod backward;
mod checkpoint;
mod forward;
mod params;
mod train;

pub use adam::{adam_step, AdamState};
pub use arch::{ArchSpec, LayerShape, POINT_FEATURES};
pub use backward::backward;
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use forward::{
    decode, encode, forward_diagnostics, reconstruction_loss, ForwardEval, LatentVector,
};
pub use params::{AutoencoderParams, TrainingMeta};
pub use train::{extract_latents, train_autoencoder, TrainConfig};
