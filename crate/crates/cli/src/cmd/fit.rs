//! `fit`: fit one one-class model on a whole latent bank.
//!
//! The bank is taken as the normal-class training set; assembling it (for
//! example via a manifest of normal items only) is the caller's job.
//! Hyperparameters come as comma-separated `key=value` pairs in `--params`,
//! with data-shaped defaults for anything omitted.

use crate::config::Resolver;
use crate::CliError;
use pcnd_core::one_class::{
    fit_deepsvdd, fit_gods, fit_kpcand, fit_ocsvm, save_model, DeepSvddConfig, GodsConfig,
};
use pcnd_core::{ClassifierKind, KernelSpec, LatentBank, OneClassModel};
use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

#[derive(clap::Args)]
pub struct Args {
    /// Classifier kind: ocsvm, kpcand, deepsvdd, or gods.
    #[arg(long)]
    kind: Option<String>,
    /// Latent bank holding the normal training rows.
    #[arg(long)]
    bank: Option<String>,
    /// Hyperparameters as "k=v,k=v". ocsvm: nu, gamma; kpcand: sigma, q;
    /// deepsvdd: nu, epochs, lr; gods: m, eta, lambda, iters.
    #[arg(long)]
    params: Option<String>,
    /// Seed for the stochastic kinds (deepsvdd, gods).
    #[arg(long)]
    seed: Option<u64>,
    /// Model output path (.ocm1).
    #[arg(long)]
    out: Option<String>,
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let Some((key, value)) = part.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "--params entry {part:?} is not key=value"
                )));
            };
            if map
                .insert(key.trim().to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Usage(format!(
                    "--params repeats key {:?}",
                    key.trim()
                )));
            }
        }
        Ok(Self(map))
    }

    fn take<T>(&mut self, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.0.remove(key) {
            Some(raw) => raw.parse().map_err(|e| {
                CliError::Usage(format!("--params {key}: invalid value {raw:?}: {e}"))
            }),
            None => Ok(default),
        }
    }

    fn reject_leftovers(&self, kind: ClassifierKind) -> Result<(), CliError> {
        if let Some(key) = self.0.keys().next() {
            return Err(CliError::Usage(format!(
                "unknown parameter {key:?} for {kind}"
            )));
        }
        Ok(())
    }
}

fn fit_model(
    kind: ClassifierKind,
    rows: &[Vec<f64>],
    mut params: Params,
    seed: u64,
) -> Result<OneClassModel, CliError> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    match kind {
        ClassifierKind::OcSvm => {
            let nu = params.take("nu", 0.1)?;
            let gamma = params.take("gamma", 1.0 / d.max(1) as f64)?;
            params.reject_leftovers(kind)?;
            log::info!("fit ocsvm: nu={nu} gamma={gamma} on {n} rows (dim {d})");
            Ok(OneClassModel::OcSvm(fit_ocsvm(
                rows,
                nu,
                KernelSpec::Rbf { gamma },
            )?))
        }
        ClassifierKind::KpcaNd => {
            let sigma = params.take("sigma", 1.0)?;
            let q = params.take("q", 8.min(n.saturating_sub(1)).max(1))?;
            params.reject_leftovers(kind)?;
            log::info!("fit kpcand: sigma={sigma} q={q} on {n} rows (dim {d})");
            Ok(OneClassModel::KpcaNd(fit_kpcand(
                rows,
                KernelSpec::Gaussian { sigma },
                q,
            )?))
        }
        ClassifierKind::DeepSvdd => {
            let cfg = DeepSvddConfig {
                nu: params.take("nu", 0.1)?,
                epochs: params.take("epochs", 150)?,
                learning_rate: params.take("lr", 1e-3)?,
                seed,
                ..DeepSvddConfig::default()
            };
            params.reject_leftovers(kind)?;
            log::info!(
                "fit deepsvdd: nu={} epochs={} lr={} seed={seed} on {n} rows (dim {d})",
                cfg.nu,
                cfg.epochs,
                cfg.learning_rate
            );
            Ok(OneClassModel::DeepSvdd(fit_deepsvdd(rows, &cfg)?))
        }
        ClassifierKind::Gods => {
            let cfg = GodsConfig {
                m: params.take("m", 5.min(d).max(1))?,
                eta: params.take("eta", 1.0)?,
                lambda: params.take("lambda", 1e-2)?,
                iters: params.take("iters", 300)?,
                seed,
            };
            params.reject_leftovers(kind)?;
            log::info!(
                "fit gods: m={} eta={} lambda={} iters={} seed={seed} on {n} rows (dim {d})",
                cfg.m,
                cfg.eta,
                cfg.lambda,
                cfg.iters
            );
            Ok(OneClassModel::Gods(fit_gods(rows, &cfg)?))
        }
    }
}

pub fn run(args: Args, r: &mut Resolver) -> Result<(), CliError> {
    let kind_name = r.required("kind", args.kind)?;
    let bank_path = r.required("bank", args.bank)?;
    let params_text = r.with_default("params", args.params, String::new())?;
    let seed = r.with_default("seed", args.seed, 0)?;
    let out = r.required("out", args.out)?;
    r.finish("fit")?;

    let kind: ClassifierKind = kind_name.parse().map_err(CliError::Usage)?;
    let params = Params::parse(&params_text)?;
    let bank = LatentBank::load(Path::new(&bank_path))?;
    let rows: Vec<Vec<f64>> = (0..bank.len()).map(|i| bank.row_f64(i)).collect();
    let model = fit_model(kind, &rows, params, seed)?;
    save_model(Path::new(&out), &model)?;
    log::info!("wrote {out}");
    Ok(())
}
