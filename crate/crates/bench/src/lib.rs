//! Seeded input builders shared by the benchmarks.

use pcnd_core::autoencoder::{ArchSpec, AutoencoderParams};
use pcnd_core::fractal::{chaos_game, sample_ifs, IfsSystem};
use pcnd_core::geometry::PointCloud;
use pcnd_core::rng::stream_rng;
use rand::Rng;

pub fn uniform_cloud(n: usize, seed: u64) -> PointCloud {
    let mut rng = stream_rng(seed, &[90]);
    let pts = (0..n)
        .map(|_| {
            [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]
        })
        .collect();
    PointCloud::new(pts).unwrap()
}

pub fn uniform_scores(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, &[91]);
    (0..n).map(|_| rng.random_range(-4.0..4.0)).collect()
}

pub fn latent_rows(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, &[92]);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

pub fn small_params(seed: u64) -> AutoencoderParams {
    AutoencoderParams::init(&ArchSpec::small(), seed).unwrap()
}

/// A random IFS that demonstrably survives a long chaos game, so the
/// benchmark body never has to handle divergence.
pub fn stable_ifs(seed: u64) -> IfsSystem {
    let mut rng = stream_rng(seed, &[93]);
    loop {
        let ifs = sample_ifs(&mut rng);
        if chaos_game(&ifs, 20_000, 100, &mut rng.clone()).is_ok() {
            return ifs;
        }
    }
}
