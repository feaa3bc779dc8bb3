//! `train-ae`: train the general feature extractor.

use crate::config::Resolver;
use crate::CliError;
use pcnd_core::autoencoder::{save_checkpoint, train_autoencoder, TrainConfig};
use pcnd_core::geometry::PointCloud;
use pcnd_core::{ArchSpec, Manifest};
use rayon::prelude::*;
use std::path::Path;

#[derive(clap::Args)]
pub struct Args {
    /// Training manifest; rows tagged with a split other than "train" are
    /// skipped.
    #[arg(long)]
    manifest: Option<String>,
    /// Training epochs.
    #[arg(long)]
    epochs: Option<usize>,
    /// Adam learning rate.
    #[arg(long)]
    lr: Option<f64>,
    /// Initialization and shuffling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Checkpoint output path (.paec).
    #[arg(long)]
    out: Option<String>,
    /// Architecture preset: default or small.
    #[arg(long)]
    arch: Option<String>,
    /// Minibatch size.
    #[arg(long)]
    batch_size: Option<usize>,
}

fn parse_arch(name: &str) -> Result<ArchSpec, CliError> {
    match name {
        "default" => Ok(ArchSpec::default()),
        "small" => Ok(ArchSpec::small()),
        _ => Err(CliError::Usage(format!(
            "unknown architecture {name:?}; expected default or small"
        ))),
    }
}

pub fn run(args: Args, r: &mut Resolver) -> Result<(), CliError> {
    let manifest_path = r.required("manifest", args.manifest)?;
    let epochs = r.with_default("epochs", args.epochs, 300)?;
    let lr = r.with_default("lr", args.lr, 1e-4)?;
    let seed = r.with_default("seed", args.seed, 0)?;
    let out = r.required("out", args.out)?;
    let arch_name = r.with_default("arch", args.arch, "default".to_string())?;
    let batch_size = r.with_default("batch-size", args.batch_size, 16)?;
    r.finish("train-ae")?;

    let arch = parse_arch(&arch_name)?;
    let manifest = Manifest::read(Path::new(&manifest_path))?;
    let records: Vec<_> = manifest
        .records()
        .iter()
        .filter(|rec| rec.split.as_deref().is_none_or(|s| s == "train"))
        .collect();
    if records.is_empty() {
        return Err(pcnd_core::Error::Degenerate(format!(
            "{manifest_path}: no training records (every row is tagged with another split)"
        ))
        .into());
    }
    let clouds: Vec<PointCloud> = records
        .par_iter()
        .map(|rec| manifest.load_cloud(rec))
        .collect::<pcnd_core::Result<_>>()?;
    log::info!("training on {} clouds from {manifest_path}", clouds.len());

    let cfg = TrainConfig {
        learning_rate: lr,
        epochs,
        batch_size,
        seed,
        ..TrainConfig::default()
    };
    let params = train_autoencoder(&clouds, &arch, &cfg)?;
    save_checkpoint(Path::new(&out), &params)?;
    log::info!(
        "final loss {:.6}, extractor fingerprint {:016x}; wrote {out}",
        params.meta.final_loss,
        params.fingerprint()
    );
    Ok(())
}
