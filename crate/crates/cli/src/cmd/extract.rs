//! `extract`: frozen-extractor latent extraction.

use crate::config::Resolver;
use crate::CliError;
use pcnd_core::autoencoder::{extract_latents, load_checkpoint};
use pcnd_core::geometry::PointCloud;
use pcnd_core::Manifest;
use rayon::prelude::*;
use std::path::Path;

#[derive(clap::Args)]
pub struct Args {
    /// Autoencoder checkpoint (.paec).
    #[arg(long)]
    ckpt: Option<String>,
    /// Manifest of clouds to encode; the relative path becomes the item id.
    #[arg(long)]
    manifest: Option<String>,
    /// Latent bank output path (.ltb1).
    #[arg(long)]
    out: Option<String>,
}

pub fn run(args: Args, r: &mut Resolver) -> Result<(), CliError> {
    let ckpt = r.required("ckpt", args.ckpt)?;
    let manifest_path = r.required("manifest", args.manifest)?;
    let out = r.required("out", args.out)?;
    r.finish("extract")?;

    let params = load_checkpoint(Path::new(&ckpt))?;
    let manifest = Manifest::read(Path::new(&manifest_path))?;
    let items: Vec<(String, String, PointCloud)> = manifest
        .records()
        .par_iter()
        .map(|rec| {
            manifest
                .load_cloud(rec)
                .map(|cloud| (rec.path.clone(), rec.class.clone(), cloud))
        })
        .collect::<pcnd_core::Result<_>>()?;
    let bank = extract_latents(&params, &items)?;
    bank.save(Path::new(&out))?;
    log::info!(
        "extracted {} latents (dim {}), extractor fingerprint {:016x}; wrote {out}",
        bank.len(),
        bank.dim(),
        bank.fingerprint()
    );
    Ok(())
}
