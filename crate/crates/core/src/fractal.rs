//! Fractal point-cloud generation with iterated function systems.
//!
//! Each class is one randomly drawn [`IfsSystem`] whose chaos-game attractor
//! passes a per-axis variance gate. Samples are fresh traces of that attractor,
//! variance-filtered, mixed with points from an auxiliary attractor ("fractal
//! noise") and normalized to the unit sphere. The whole dataset is a pure
//! function of `(n_classes, samples_per_class, config, seed)`.

use crate::error::{Error, Result};
use crate::geometry::{axis_variances, normalize_unit_sphere, resample, PointCloud};
use crate::rng::{stream, stream_rng};
use rand::Rng;
use rayon::prelude::*;

const PROB_FLOOR: f64 = 1e-6;
const NOISE_BURN_IN: usize = 100;
const NOISE_DRAW_CAP: usize = 10_000;

/// One affine contraction `x -> A x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
}

impl AffineMap {
    fn apply(&self, x: &[f64; 3]) -> [f64; 3] {
        let mut y = self.b;
        for r in 0..3 {
            for c in 0..3 {
                y[r] += self.a[r][c] * x[c];
            }
        }
        y
    }

    fn det(&self) -> f64 {
        let a = &self.a;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }
}

/// A set of 2 to 8 affine maps with determinant-proportional sampling
/// probabilities; the generator of one fractal class.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsSystem {
    maps: Vec<AffineMap>,
    probs: Vec<f64>,
}

impl IfsSystem {
    /// Builds a system from explicit maps. Probabilities are set proportional
    /// to `|det A_i|`, each floored at 1e-6 before renormalization.
    pub fn from_maps(maps: Vec<AffineMap>) -> Result<Self> {
        if !(2..=8).contains(&maps.len()) {
            return Err(Error::Degenerate(format!(
                "IFS needs 2..=8 maps, got {}",
                maps.len()
            )));
        }
        let raw: Vec<f64> = maps.iter().map(|m| m.det().abs().max(PROB_FLOOR)).collect();
        let total: f64 = raw.iter().sum();
        let probs = raw.iter().map(|p| p / total).collect();
        Ok(Self { maps, probs })
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn pick(&self, u: f64) -> &AffineMap {
        let mut acc = 0.0;
        for (map, &p) in self.maps.iter().zip(&self.probs) {
            acc += p;
            if u < acc {
                return map;
            }
        }
        self.maps.last().unwrap()
    }
}

/// Generation parameters; defaults match the reference configuration.
#[derive(Clone, Debug)]
pub struct FractalConfig {
    pub points_per_cloud: usize,
    pub variance_threshold: f64,
    pub noise_ratio: f64,
    pub chaos_iterations: usize,
    pub burn_in: usize,
    pub max_rejections: usize,
}

impl Default for FractalConfig {
    fn default() -> Self {
        Self {
            points_per_cloud: 2048,
            variance_threshold: 0.05,
            noise_ratio: 0.2,
            chaos_iterations: 20_000,
            burn_in: 100,
            max_rejections: 1000,
        }
    }
}

impl FractalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_cloud == 0 {
            return Err(Error::Degenerate("points_per_cloud must be >= 1".into()));
        }
        if self.chaos_iterations == 0 {
            return Err(Error::Degenerate("chaos_iterations must be >= 1".into()));
        }
        if self.max_rejections == 0 {
            return Err(Error::Degenerate("max_rejections must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.noise_ratio) {
            return Err(Error::Degenerate(format!(
                "noise_ratio must be in [0,1), got {}",
                self.noise_ratio
            )));
        }
        Ok(())
    }
}

/// Draws a random system: k uniform in {2..8}, all matrix and offset entries
/// uniform in [-1, 1].
pub fn sample_ifs<R: Rng>(rng: &mut R) -> IfsSystem {
    let k = rng.random_range(2..=8usize);
    let maps = (0..k)
        .map(|_| {
            let mut a = [[0.0; 3]; 3];
            for row in &mut a {
                for v in row {
                    *v = rng.random_range(-1.0..1.0);
                }
            }
            let mut b = [0.0; 3];
            for v in &mut b {
                *v = rng.random_range(-1.0..1.0);
            }
            AffineMap { a, b }
        })
        .collect();
    IfsSystem::from_maps(maps).unwrap()
}

/// Runs the chaos game from the origin: `burn_in` discarded iterations, then
/// `n` collected points.
pub fn chaos_game<R: Rng>(
    ifs: &IfsSystem,
    n: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let mut x = [0.0f64; 3];
    let mut points = Vec::with_capacity(n);
    for step in 0..burn_in + n {
        x = ifs.pick(rng.random::<f64>()).apply(&x);
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::DivergentIfs);
        }
        if step >= burn_in {
            points.push(x);
        }
    }
    PointCloud::new(points)
}

/// True iff every axis of the unit-sphere-normalized cloud has population
/// variance at least `threshold`.
pub fn variance_ok(cloud: &PointCloud, threshold: f64) -> bool {
    axis_variances(&normalize_unit_sphere(cloud))
        .iter()
        .all(|&v| v >= threshold)
}

/// Replaces `round(ratio * n)` points with points traced from an independently
/// drawn auxiliary attractor, normalized to the unit sphere. Output size is
/// unchanged.
pub fn mix_fractal_noise<R: Rng>(cloud: &PointCloud, ratio: f64, rng: &mut R) -> Result<PointCloud> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::Degenerate(format!(
            "noise ratio must be in [0,1), got {ratio}"
        )));
    }
    let n = cloud.len();
    let m = (ratio * n as f64).round() as usize;
    if m == 0 {
        return Ok(cloud.clone());
    }
    let noise = draw_noise_attractor(m, rng)?;
    let replaced = rand::seq::index::sample(rng, n, m);
    let mut points = cloud.points().to_vec();
    for (j, i) in replaced.iter().enumerate() {
        points[i] = noise.points()[j];
    }
    PointCloud::new(points)
}

fn draw_noise_attractor<R: Rng>(m: usize, rng: &mut R) -> Result<PointCloud> {
    for _ in 0..NOISE_DRAW_CAP {
        let aux = sample_ifs(rng);
        let Ok(raw) = chaos_game(&aux, m, NOISE_BURN_IN, rng) else {
            continue;
        };
        let normalized = normalize_unit_sphere(&raw);
        if normalized
            .points()
            .iter()
            .any(|p| p.iter().any(|&c| c != 0.0))
        {
            return Ok(normalized);
        }
    }
    Err(Error::Degenerate(
        "could not draw a usable noise attractor".into(),
    ))
}

/// Generates `n_classes` fractal classes with `samples_per_class` clouds each,
/// grouped class-major (outer index is the label).
pub fn generate_fractal_dataset(
    n_classes: usize,
    samples_per_class: usize,
    config: &FractalConfig,
    seed: u64,
) -> Result<Vec<Vec<PointCloud>>> {
    if n_classes == 0 || samples_per_class == 0 {
        return Err(Error::Degenerate(
            "need at least one class and one sample per class".into(),
        ));
    }
    config.validate()?;
    (0..n_classes as u64)
        .into_par_iter()
        .map(|class| generate_class(class, samples_per_class, config, seed))
        .collect()
}

/// Attempts per sample before the class system itself is rejected. A system
/// whose probe passed by a fluke can still produce mostly sub-threshold
/// traces; falling back to a fresh system keeps generation total.
const SAMPLE_RETRY_CAP: u64 = 50;

fn generate_class(
    class: u64,
    samples: usize,
    config: &FractalConfig,
    seed: u64,
) -> Result<Vec<PointCloud>> {
    'candidates: for attempt in 0..config.max_rejections as u64 {
        let Some(system) = accept_candidate(class, attempt, config, seed)? else {
            continue;
        };
        let mut clouds = Vec::with_capacity(samples);
        for s in 0..samples as u64 {
            match generate_sample(&system, class, s, config, seed)? {
                Some(cloud) => clouds.push(cloud),
                None => continue 'candidates,
            }
        }
        return Ok(clouds);
    }
    Err(Error::VarianceThreshold {
        attempts: config.max_rejections,
    })
}

/// Draws candidate `attempt` for this class and gates it on one probe trace.
/// The candidate's stream also traces its probe cloud.
fn accept_candidate(
    class: u64,
    attempt: u64,
    config: &FractalConfig,
    seed: u64,
) -> Result<Option<IfsSystem>> {
    let mut rng = stream_rng(seed, &[stream::IFS_SYSTEM, class, attempt]);
    let candidate = sample_ifs(&mut rng);
    let Ok(trace) = chaos_game(&candidate, config.chaos_iterations, config.burn_in, &mut rng)
    else {
        return Ok(None);
    };
    let probe = resample(&trace, config.points_per_cloud, &mut rng)?;
    Ok(if variance_ok(&probe, config.variance_threshold) {
        Some(candidate)
    } else {
        None
    })
}

fn generate_sample(
    system: &IfsSystem,
    class: u64,
    sample: u64,
    config: &FractalConfig,
    seed: u64,
) -> Result<Option<PointCloud>> {
    for attempt in 0..SAMPLE_RETRY_CAP {
        let mut trace_rng = stream_rng(seed, &[stream::IFS_SAMPLE, class, sample, attempt]);
        let Ok(trace) = chaos_game(system, config.chaos_iterations, config.burn_in, &mut trace_rng)
        else {
            continue;
        };
        let mut resample_rng = stream_rng(seed, &[stream::IFS_RESAMPLE, class, sample, attempt]);
        let cloud = resample(&trace, config.points_per_cloud, &mut resample_rng)?;
        if !variance_ok(&cloud, config.variance_threshold) {
            continue;
        }
        let mut noise_rng = stream_rng(seed, &[stream::IFS_NOISE, class, sample, attempt]);
        let mixed = mix_fractal_noise(&cloud, config.noise_ratio, &mut noise_rng)?;
        let finished = normalize_unit_sphere(&mixed);
        if variance_ok(&finished, config.variance_threshold) {
            return Ok(Some(finished));
        }
    }
    Ok(None)
}
