//! Checkpoint files ("PAEC").
//!
//! Layout, all little-endian: magic `PAEC`, format version u16, the 11
//! architecture fields as u32 words, parameter count u64, one f32 blob per
//! layer in declaration order, then a u32-counted list of u32
//! length-prefixed `key=value` metadata strings. Weights are stored in
//! 32-bit precision; the in-memory f64 weights are truncated on save.

use super::arch::ArchSpec;
use super::params::{AutoencoderParams, TrainingMeta};
use crate::binio::{Reader, Writer};
use crate::error::Result;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

const MAGIC: &[u8; 4] = b"PAEC";
const VERSION: u16 = 1;
const MAX_META_LEN: u32 = 1 << 16;

pub fn save_checkpoint(path: &Path, params: &AutoencoderParams) -> Result<()> {
    let mut w = Writer::new(BufWriter::new(File::create(path)?));
    w.bytes(MAGIC)?;
    w.u16(VERSION)?;
    for word in params.arch.field_words() {
        w.u32(word)?;
    }
    w.u64(params.arch.param_count() as u64)?;
    for &v in params.weights() {
        w.f32(v as f32)?;
    }
    let meta = &params.meta;
    w.u32(3)?;
    w.string(&format!("epochs={}", meta.epochs_trained))?;
    w.string(&format!("final_loss={}", meta.final_loss))?;
    w.string(&format!(
        "dataset_fingerprint={:016x}",
        meta.dataset_fingerprint
    ))?;
    w.finish()
}

pub fn load_checkpoint(path: &Path) -> Result<AutoencoderParams> {
    let mut r = Reader::new(BufReader::new(File::open(path)?), path);
    r.magic(MAGIC, "checkpoint")?;
    let version = r.u16()?;
    if version != VERSION {
        return Err(r.fail(format!(
            "unsupported checkpoint version {version} (expected {VERSION})"
        )));
    }
    let mut words = [0u32; 11];
    for word in &mut words {
        *word = r.u32()?;
    }
    let arch = ArchSpec::from_field_words(&words);
    arch.validate().map_err(|e| r.fail(e.to_string()))?;
    let stored_count = r.u64()?;
    let expected = arch.param_count() as u64;
    if stored_count != expected {
        return Err(r.fail(format!(
            "parameter count {stored_count} does not match architecture ({expected})"
        )));
    }
    let weights: Vec<f64> = r
        .f32_vec(expected as usize)?
        .into_iter()
        .map(f64::from)
        .collect();
    let meta_count = r.u32()?;
    let mut meta = TrainingMeta::default();
    for _ in 0..meta_count {
        let entry = r.string(MAX_META_LEN)?;
        let Some((key, value)) = entry.split_once('=') else {
            return Err(r.fail(format!("malformed metadata entry {entry:?}")));
        };
        match key {
            "epochs" => {
                meta.epochs_trained = value
                    .parse()
                    .map_err(|_| r.fail(format!("bad epochs value {value:?}")))?;
            }
            "final_loss" => {
                meta.final_loss = value
                    .parse()
                    .map_err(|_| r.fail(format!("bad final_loss value {value:?}")))?;
            }
            "dataset_fingerprint" => {
                meta.dataset_fingerprint = u64::from_str_radix(value, 16)
                    .map_err(|_| r.fail(format!("bad dataset_fingerprint value {value:?}")))?;
            }
            _ => {}
        }
    }
    r.expect_eof()?;
    AutoencoderParams::from_weights(arch, weights, meta)
        .map_err(|e| r.fail(e.to_string()))
}
