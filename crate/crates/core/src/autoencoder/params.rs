//! Parameter storage: one flat f64 vector partitioned by the layer catalog.

use super::arch::ArchSpec;
use crate::error::{Error, Result};
use crate::rng::{fnv1a, stream, stream_rng};
use rand::Rng;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingMeta {
    pub epochs_trained: usize,
    pub final_loss: f64,
    pub dataset_fingerprint: u64,
}

#[derive(Clone, Debug)]
pub struct AutoencoderParams {
    pub arch: ArchSpec,
    weights: Vec<f64>,
    pub meta: TrainingMeta,
}

pub(crate) struct LayerView<'a> {
    pub w: &'a [f64],
    pub b: Option<&'a [f64]>,
    pub rows: usize,
    pub cols: usize,
}

/// Splits a flat buffer with the same layout as the parameter vector into one
/// layer's weight and bias slices.
pub(crate) fn layer_slices<'a>(
    arch: &ArchSpec,
    buf: &'a [f64],
    index: usize,
) -> (&'a [f64], Option<&'a [f64]>) {
    let layer = arch.layers()[index];
    let w = &buf[layer.offset..layer.offset + layer.weight_len()];
    let b = layer
        .bias
        .then(|| &buf[layer.offset + layer.weight_len()..layer.offset + layer.len()]);
    (w, b)
}

impl AutoencoderParams {
    /// Fresh parameters: weights uniform in the Glorot range
    /// `sqrt(6 / (fan_in + fan_out))`, biases zero.
    pub fn init(arch: &ArchSpec, seed: u64) -> Result<Self> {
        arch.validate()?;
        let mut rng = stream_rng(seed, &[stream::TRAIN_INIT]);
        let mut weights = vec![0.0; arch.param_count()];
        for layer in arch.layers() {
            let limit = (6.0 / (layer.cols + layer.rows) as f64).sqrt();
            for v in &mut weights[layer.offset..layer.offset + layer.weight_len()] {
                *v = rng.random_range(-limit..limit);
            }
        }
        Ok(Self {
            arch: arch.clone(),
            weights,
            meta: TrainingMeta::default(),
        })
    }

    pub fn from_weights(arch: ArchSpec, weights: Vec<f64>, meta: TrainingMeta) -> Result<Self> {
        arch.validate()?;
        if weights.len() != arch.param_count() {
            return Err(Error::Dimension {
                expected: arch.param_count(),
                got: weights.len(),
            });
        }
        if !weights.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("autoencoder weights".into()));
        }
        Ok(Self { arch, weights, meta })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub(crate) fn layer(&self, index: usize) -> LayerView<'_> {
        let shape = self.arch.layers()[index];
        let (w, b) = layer_slices(&self.arch, &self.weights, index);
        LayerView {
            w,
            b,
            rows: shape.rows,
            cols: shape.cols,
        }
    }

    /// Identity of the extractor as it behaves on disk: architecture words
    /// plus the f32-rounded weights. Stable across save/load.
    pub fn fingerprint(&self) -> u64 {
        let mut bytes = Vec::with_capacity(11 * 4 + self.weights.len() * 4);
        for word in self.arch.field_words() {
            bytes.extend_from_slice(&word.to_le_bytes());
        }
        for &w in &self.weights {
            bytes.extend_from_slice(&(w as f32).to_le_bytes());
        }
        fnv1a(&bytes)
    }
}
