//! `score`: score every bank row under a fitted model.

use crate::config::Resolver;
use crate::CliError;
use pcnd_core::one_class::load_model;
use pcnd_core::{Error, LatentBank};
use std::fmt::Write as _;
use std::path::Path;

#[derive(clap::Args)]
pub struct Args {
    /// Fitted model (.ocm1).
    #[arg(long)]
    model: Option<String>,
    /// Latent bank to score.
    #[arg(long)]
    bank: Option<String>,
    /// Output CSV (id,label,score).
    #[arg(long)]
    out: Option<String>,
}

pub fn run(args: Args, r: &mut Resolver) -> Result<(), CliError> {
    let model_path = r.required("model", args.model)?;
    let bank_path = r.required("bank", args.bank)?;
    let out = r.required("out", args.out)?;
    r.finish("score")?;

    let model = load_model(Path::new(&model_path))?;
    let bank = LatentBank::load(Path::new(&bank_path))?;
    if model.dim() != bank.dim() {
        return Err(Error::Dimension {
            expected: model.dim(),
            got: bank.dim(),
        }
        .into());
    }

    let mut text = String::new();
    writeln!(text, "# model: {} ({model_path})", model.kind()).unwrap();
    writeln!(text, "# extractor fingerprint: {:016x}", bank.fingerprint()).unwrap();
    writeln!(text, "# higher score = more anomalous").unwrap();
    writeln!(text, "id,label,score").unwrap();
    for i in 0..bank.len() {
        let score = model.score(&bank.row_f64(i));
        writeln!(text, "{},{},{score}", bank.ids()[i], bank.labels()[i]).unwrap();
    }
    std::fs::write(Path::new(&out), text)?;
    log::info!("scored {} items under {}; wrote {out}", bank.len(), model.kind());
    Ok(())
}
