//! `benchmark`: every class as the anomaly in turn.
//!
//! Writes the aligned text report to OUT and the machine-readable version
//! to OUT.csv. Passing `--ckpt` and `--manifest` adds the reconstruction
//! -loss baseline column scored by the same frozen extractor.

use super::{parse_kinds, ALL_KINDS};
use crate::config::Resolver;
use crate::CliError;
use pcnd_core::autoencoder::load_checkpoint;
use pcnd_core::eval::{reconstruction_baseline, run_benchmark};
use pcnd_core::geometry::PointCloud;
use pcnd_core::{Error, LatentBank, Manifest};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(clap::Args)]
pub struct Args {
    /// Latent bank with class labels.
    #[arg(long)]
    bank: Option<String>,
    /// Comma-separated classifier kinds.
    #[arg(long)]
    kinds: Option<String>,
    /// Split and fit seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report output path; the CSV twin goes to OUT.csv.
    #[arg(long)]
    out: Option<String>,
    /// Checkpoint for the reconstruction baseline (with --manifest).
    #[arg(long)]
    ckpt: Option<String>,
    /// Manifest locating the raw clouds behind the bank ids (with --ckpt).
    #[arg(long)]
    manifest: Option<String>,
}

fn baseline_scores(
    ckpt: &str,
    manifest_path: &str,
    bank: &LatentBank,
) -> Result<BTreeMap<String, f64>, CliError> {
    let params = load_checkpoint(Path::new(ckpt))?;
    if params.fingerprint() != bank.fingerprint() {
        return Err(Error::Degenerate(format!(
            "extractor fingerprint mismatch: checkpoint {:016x}, bank {:016x}",
            params.fingerprint(),
            bank.fingerprint()
        ))
        .into());
    }
    let manifest = Manifest::read(Path::new(manifest_path))?;
    let items: Vec<(String, PointCloud)> = manifest
        .records()
        .par_iter()
        .map(|rec| manifest.load_cloud(rec).map(|c| (rec.path.clone(), c)))
        .collect::<pcnd_core::Result<_>>()?;
    Ok(reconstruction_baseline(&params, &items)?)
}

pub fn run(args: Args, r: &mut Resolver) -> Result<(), CliError> {
    let bank_path = r.required("bank", args.bank)?;
    let kind_list = r.with_default("kinds", args.kinds, ALL_KINDS.to_string())?;
    let seed = r.with_default("seed", args.seed, 0)?;
    let out = r.required("out", args.out)?;
    let ckpt = r.optional("ckpt", args.ckpt)?;
    let manifest = r.optional("manifest", args.manifest)?;
    r.finish("benchmark")?;

    let kinds = parse_kinds(&kind_list)?;
    let bank = LatentBank::load(Path::new(&bank_path))?;
    let baseline = match (&ckpt, &manifest) {
        (Some(c), Some(m)) => Some(baseline_scores(c, m, &bank)?),
        (None, None) => None,
        _ => {
            return Err(CliError::Usage(
                "--ckpt and --manifest must be given together; they enable the \
                 reconstruction baseline"
                    .into(),
            ))
        }
    };

    let report = run_benchmark(&bank, &kinds, seed, baseline.as_ref())?;
    std::fs::write(Path::new(&out), report.to_text())?;
    let csv = format!("{out}.csv");
    std::fs::write(Path::new(&csv), report.to_delimited())?;
    for (kind, avg) in report.kinds.iter().zip(&report.averages) {
        log::info!("{kind}: average AUC {avg:.3}");
    }
    if let Some(avg) = report.baseline_average {
        log::info!("baseline: average AUC {avg:.3}");
    }
    log::info!("wrote {out} and {csv}");
    Ok(())
}
