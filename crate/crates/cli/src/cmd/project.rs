//! `project`: 2-d principal-axis projection of a latent bank.

use crate::config::Resolver;
use crate::CliError;
use pcnd_core::eval::project_2d;
use pcnd_core::LatentBank;
use std::fmt::Write as _;
use std::path::Path;

#[derive(clap::Args)]
pub struct Args {
    /// Latent bank to project.
    #[arg(long)]
    bank: Option<String>,
    /// Output CSV (id,label,x,y).
    #[arg(long)]
    out: Option<String>,
}

pub fn run(args: Args, r: &mut Resolver) -> Result<(), CliError> {
    let bank_path = r.required("bank", args.bank)?;
    let out = r.required("out", args.out)?;
    r.finish("project")?;

    let bank = LatentBank::load(Path::new(&bank_path))?;
    let proj = project_2d(&bank)?;

    let mut text = String::new();
    writeln!(text, "# extractor fingerprint: {:016x}", bank.fingerprint()).unwrap();
    writeln!(
        text,
        "# axis eigenvalues: {} {}",
        proj.eigenvalues[0], proj.eigenvalues[1]
    )
    .unwrap();
    writeln!(text, "id,label,x,y").unwrap();
    for (i, id) in proj.ids.iter().enumerate() {
        writeln!(
            text,
            "{id},{},{},{}",
            proj.labels[i], proj.coords[i][0], proj.coords[i][1]
        )
        .unwrap();
    }
    std::fs::write(Path::new(&out), text)?;
    log::info!("projected {} items; wrote {out}", proj.ids.len());
    Ok(())
}
