//! `gen-fractal`: seeded fractal dataset generation.

use crate::config::Resolver;
use crate::CliError;
use pcnd_core::io::{write_pcb, Manifest, ManifestRecord};
use pcnd_core::fractal::generate_fractal_dataset;
use pcnd_core::FractalConfig;
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct Args {
    /// Number of fractal classes.
    #[arg(long)]
    classes: Option<usize>,
    /// Samples per class.
    #[arg(long)]
    per_class: Option<usize>,
    /// Master seed; equal flags give byte-identical output.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (PCB files plus manifest.csv).
    #[arg(long)]
    out: Option<String>,
    /// Points per cloud.
    #[arg(long)]
    points: Option<usize>,
    /// Chaos-game iterations per attractor trace.
    #[arg(long)]
    chaos_iterations: Option<usize>,
}

pub fn run(args: Args, r: &mut Resolver) -> Result<(), CliError> {
    let classes = r.required("classes", args.classes)?;
    let per_class = r.required("per-class", args.per_class)?;
    let seed = r.with_default("seed", args.seed, 0)?;
    let out = PathBuf::from(r.required("out", args.out)?);
    let points = r.with_default("points", args.points, 2048)?;
    let chaos_iterations =
        r.with_default("chaos-iterations", args.chaos_iterations, 20_000)?;
    r.finish("gen-fractal")?;

    let config = FractalConfig {
        points_per_cloud: points,
        chaos_iterations,
        ..FractalConfig::default()
    };
    let dataset = generate_fractal_dataset(classes, per_class, &config, seed)?;

    std::fs::create_dir_all(&out)?;
    let mut records = Vec::with_capacity(classes * per_class);
    for (c, clouds) in dataset.iter().enumerate() {
        let class = format!("class{c:02}");
        for (i, cloud) in clouds.iter().enumerate() {
            let name = format!("{class}_{i:03}.pcb");
            write_pcb(&out.join(&name), cloud)?;
            records.push(ManifestRecord {
                path: name,
                class: class.clone(),
                split: None,
            });
        }
    }
    Manifest::write(&out.join("manifest.csv"), &records)?;
    log::info!(
        "wrote {} clouds ({classes} classes x {per_class}) to {}",
        records.len(),
        out.display()
    );
    Ok(())
}
