//! `evaluate`: the leave-one-class-out protocol for one anomaly class.
//!
//! Runs the same split / grid-search / test-AUC machinery as `benchmark`,
//! so the reported row matches the benchmark row for the same bank, seed,
//! and kind list exactly.

use super::{parse_kinds, ALL_KINDS};
use crate::config::Resolver;
use crate::CliError;
use pcnd_core::eval::evaluate_class;
use pcnd_core::LatentBank;
use std::fmt::Write as _;
use std::path::Path;

#[derive(clap::Args)]
pub struct Args {
    /// Latent bank with class labels.
    #[arg(long)]
    bank: Option<String>,
    /// The class treated as anomalous; all others are normal.
    #[arg(long)]
    anomaly_class: Option<String>,
    /// Comma-separated classifier kinds.
    #[arg(long)]
    kinds: Option<String>,
    /// Split and fit seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report output path.
    #[arg(long)]
    out: Option<String>,
}

pub fn run(args: Args, r: &mut Resolver) -> Result<(), CliError> {
    let bank_path = r.required("bank", args.bank)?;
    let anomaly_class = r.required("anomaly-class", args.anomaly_class)?;
    let kind_list = r.with_default("kinds", args.kinds, ALL_KINDS.to_string())?;
    let seed = r.with_default("seed", args.seed, 0)?;
    let out = r.required("out", args.out)?;
    r.finish("evaluate")?;

    let kinds = parse_kinds(&kind_list)?;
    let bank = LatentBank::load(Path::new(&bank_path))?;
    let classes = bank.classes();
    if !classes.contains(&anomaly_class) {
        return Err(CliError::Usage(format!(
            "unknown anomaly class {anomaly_class:?}; valid classes: {}",
            classes.join(", ")
        )));
    }

    let eval = evaluate_class(&bank, &kinds, &anomaly_class, seed)?;

    let mut text = String::new();
    writeln!(text, "# extractor fingerprint: {:016x}", bank.fingerprint()).unwrap();
    writeln!(text, "# seed: {seed}").unwrap();
    writeln!(text, "# anomaly class: {anomaly_class}").unwrap();
    writeln!(
        text,
        "# train/validation/test items: {}/{}/{}",
        eval.task.train.len(),
        eval.task.validation.len(),
        eval.task.test.len()
    )
    .unwrap();
    writeln!(text, "# higher score = more anomalous").unwrap();
    writeln!(text, "{:<9}{:>9}{:>16}  params", "kind", "test_auc", "validation_auc").unwrap();
    for (i, kind) in kinds.iter().enumerate() {
        let (point, validation_auc) = &eval.chosen[i];
        writeln!(
            text,
            "{:<9}{:>9.3}{:>16.3}  {point}",
            kind.name(),
            eval.test_aucs[i],
            validation_auc
        )
        .unwrap();
        log::info!("{kind}: test AUC {:.3}", eval.test_aucs[i]);
    }
    std::fs::write(Path::new(&out), text)?;
    log::info!("wrote {out}");
    Ok(())
}
