//! Forward passes: feature preparation, encoder, folding decoder, and the
//! reconstruction loss with its nonsmooth-structure diagnostics.
//!
//! Bit-level permutation invariance of the encoder rests on three rules:
//! neighborhoods are selected and ordered canonically by (squared distance,
//! then lexicographic coordinates), covariance sums run in that canonical
//! order, and every max-pool normalizes signed zeros so tie values carry
//! identical bits regardless of scan order.

use super::arch::POINT_FEATURES;
use super::params::{AutoencoderParams, LayerView};
use crate::error::{Error, Result};
use crate::geometry::{
    directed_mean, dist2, grad_from_correspondences, nn_correspondences, NnIndex, PointCloud,
};
use crate::rng::fnv1a;

const SLOPE: f64 = 0.01;

/// The encoder's fixed-size output for one cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct LatentVector {
    values: Vec<f64>,
}

impl LatentVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("latent vector".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Input cloud with canonical neighborhoods and 12-d per-point features.
pub(crate) struct PreparedCloud {
    pub cloud: PointCloud,
    pub features: Vec<f64>,
    pub neighbors: Vec<u32>,
    pub hood: usize,
}

pub(crate) fn prepare_cloud(knn_k: usize, cloud: &PointCloud) -> Result<PreparedCloud> {
    let n = cloud.len();
    if n < knn_k + 1 {
        return Err(Error::TooFewPoints {
            need: knn_k + 1,
            got: n,
        });
    }
    let pts = cloud.points();
    let hood = knn_k + 1;
    let mut neighbors = Vec::with_capacity(n * hood);
    let mut features = Vec::with_capacity(n * POINT_FEATURES);
    let mut cand: Vec<(f64, u32)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        cand.clear();
        for (j, p) in pts.iter().enumerate() {
            if j != i {
                cand.push((dist2(&pts[i], p), j as u32));
            }
        }
        let order = |a: &(f64, u32), b: &(f64, u32)| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then_with(|| pts[a.1 as usize].partial_cmp(&pts[b.1 as usize]).unwrap())
        };
        cand.select_nth_unstable_by(knn_k - 1, order);
        cand[..knn_k].sort_unstable_by(order);
        neighbors.push(i as u32);
        neighbors.extend(cand[..knn_k].iter().map(|&(_, j)| j));

        let hood_ids = &neighbors[i * hood..(i + 1) * hood];
        let mut mu = [0.0f64; 3];
        for &j in hood_ids {
            for a in 0..3 {
                mu[a] += pts[j as usize][a];
            }
        }
        for m in &mut mu {
            *m /= hood as f64;
        }
        let mut cov = [[0.0f64; 3]; 3];
        for &j in hood_ids {
            let p = &pts[j as usize];
            let d = [p[0] - mu[0], p[1] - mu[1], p[2] - mu[2]];
            for r in 0..3 {
                for c in 0..3 {
                    cov[r][c] += d[r] * d[c];
                }
            }
        }
        features.extend_from_slice(&pts[i]);
        for row in &cov {
            for &v in row {
                features.push(v / hood as f64);
            }
        }
    }
    Ok(PreparedCloud {
        cloud: cloud.clone(),
        features,
        neighbors,
        hood,
    })
}

fn affine(view: &LayerView<'_>, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), view.cols);
    debug_assert_eq!(y.len(), view.rows);
    for (r, out) in y.iter_mut().enumerate() {
        let row = &view.w[r * view.cols..(r + 1) * view.cols];
        let mut acc = match view.b {
            Some(b) => b[r],
            None => 0.0,
        };
        for (wv, xv) in row.iter().zip(x) {
            acc += wv * xv;
        }
        *out = acc;
    }
}

fn leaky(values: &mut [f64]) {
    for v in values {
        if *v < 0.0 {
            *v *= SLOPE;
        }
    }
}

/// Derivative of the leaky rectifier recovered from its output sign.
pub(crate) fn slope_of(post: f64) -> f64 {
    if post > 0.0 {
        1.0
    } else {
        SLOPE
    }
}

/// Applies one layer pointwise over rows of a flat `n x cols` activation
/// block, with optional leaky rectification.
fn layer_over_points(view: &LayerView<'_>, input: &[f64], n: usize, rectify: bool) -> Vec<f64> {
    let mut out = vec![0.0; n * view.rows];
    for i in 0..n {
        affine(
            view,
            &input[i * view.cols..(i + 1) * view.cols],
            &mut out[i * view.rows..(i + 1) * view.rows],
        );
    }
    if rectify {
        leaky(&mut out);
    }
    out
}

/// Per-point max over the canonical neighborhood. `+ 0.0` collapses signed
/// zeros so tied maxima are bit-identical however they are reached.
fn graph_pool(input: &[f64], width: usize, neighbors: &[u32], hood: usize, n: usize) -> (Vec<f64>, Vec<u32>) {
    let mut pooled = vec![0.0; n * width];
    let mut arg = vec![0u32; n * width];
    for i in 0..n {
        let hood_ids = &neighbors[i * hood..(i + 1) * hood];
        for f in 0..width {
            let mut best = f64::NEG_INFINITY;
            let mut best_j = hood_ids[0];
            for &j in hood_ids {
                let v = input[j as usize * width + f];
                if v > best {
                    best = v;
                    best_j = j;
                }
            }
            pooled[i * width + f] = best + 0.0;
            arg[i * width + f] = best_j;
        }
    }
    (pooled, arg)
}

fn global_pool(input: &[f64], width: usize, n: usize) -> (Vec<f64>, Vec<u32>) {
    let mut pooled = vec![0.0; width];
    let mut arg = vec![0u32; width];
    for f in 0..width {
        let mut best = f64::NEG_INFINITY;
        let mut best_i = 0u32;
        for i in 0..n {
            let v = input[i * width + f];
            if v > best {
                best = v;
                best_i = i as u32;
            }
        }
        pooled[f] = best + 0.0;
        arg[f] = best_i;
    }
    (pooled, arg)
}

pub(crate) struct EncTrace {
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub a3: Vec<f64>,
    pub p1: Vec<f64>,
    pub arg1: Vec<u32>,
    pub a4: Vec<f64>,
    pub p2: Vec<f64>,
    pub arg2: Vec<u32>,
    pub a5: Vec<f64>,
    pub gmax: Vec<f64>,
    pub garg: Vec<u32>,
    pub h: Vec<f64>,
    pub z: Vec<f64>,
}

pub(crate) fn run_encoder(params: &AutoencoderParams, prep: &PreparedCloud) -> EncTrace {
    let n = prep.cloud.len();
    let arch = &params.arch;
    let a1 = layer_over_points(&params.layer(0), &prep.features, n, true);
    let a2 = layer_over_points(&params.layer(1), &a1, n, true);
    let a3 = layer_over_points(&params.layer(2), &a2, n, true);
    let (p1, arg1) = graph_pool(&a3, arch.point_mlp[2], &prep.neighbors, prep.hood, n);
    let a4 = layer_over_points(&params.layer(3), &p1, n, true);
    let (p2, arg2) = graph_pool(&a4, arch.graph1_dim, &prep.neighbors, prep.hood, n);
    let a5 = layer_over_points(&params.layer(4), &p2, n, true);
    let (gmax, garg) = global_pool(&a5, arch.graph2_dim, n);
    let mut h = vec![0.0; arch.head_hidden];
    affine(&params.layer(5), &gmax, &mut h);
    leaky(&mut h);
    let mut z = vec![0.0; arch.latent_dim];
    affine(&params.layer(6), &h, &mut z);
    EncTrace {
        a1,
        a2,
        a3,
        p1,
        arg1,
        a4,
        p2,
        arg2,
        a5,
        gmax,
        garg,
        h,
        z,
    }
}

pub(crate) struct DecTrace {
    pub t1a: Vec<f64>,
    pub t1b: Vec<f64>,
    pub s1: Vec<[f64; 3]>,
    pub t2a: Vec<f64>,
    pub t2b: Vec<f64>,
    pub s2: Vec<[f64; 3]>,
}

pub(crate) fn run_decoder(params: &AutoencoderParams, z: &[f64]) -> DecTrace {
    let arch = &params.arch;
    let m = arch.grid_points();
    let grid = arch.grid();
    let latent = arch.latent_dim;
    let (fh0, fh1) = (arch.fold_hidden[0], arch.fold_hidden[1]);
    let mut t1a = vec![0.0; m * fh0];
    let mut t1b = vec![0.0; m * fh1];
    let mut s1 = vec![[0.0f64; 3]; m];
    let mut input = vec![0.0; latent + 3];
    input[..latent].copy_from_slice(z);
    for (i, seed) in grid.iter().enumerate() {
        input[latent] = seed[0];
        input[latent + 1] = seed[1];
        let ta = &mut t1a[i * fh0..(i + 1) * fh0];
        affine(&params.layer(7), &input[..latent + 2], ta);
        leaky(ta);
        let tb = &mut t1b[i * fh1..(i + 1) * fh1];
        affine(&params.layer(8), &t1a[i * fh0..(i + 1) * fh0], tb);
        leaky(tb);
        affine(&params.layer(9), &t1b[i * fh1..(i + 1) * fh1], &mut s1[i]);
    }
    let mut t2a = vec![0.0; m * fh0];
    let mut t2b = vec![0.0; m * fh1];
    let mut s2 = vec![[0.0f64; 3]; m];
    for i in 0..m {
        input[latent..latent + 3].copy_from_slice(&s1[i]);
        let ta = &mut t2a[i * fh0..(i + 1) * fh0];
        affine(&params.layer(10), &input, ta);
        leaky(ta);
        let tb = &mut t2b[i * fh1..(i + 1) * fh1];
        affine(&params.layer(11), &t2a[i * fh0..(i + 1) * fh0], tb);
        leaky(tb);
        affine(&params.layer(12), &t2b[i * fh1..(i + 1) * fh1], &mut s2[i]);
    }
    DecTrace {
        t1a,
        t1b,
        s1,
        t2a,
        t2b,
        s2,
    }
}

/// Encodes one cloud. The cloud must have at least `knn_k + 1` points.
pub fn encode(params: &AutoencoderParams, cloud: &PointCloud) -> Result<LatentVector> {
    let prep = prepare_cloud(params.arch.knn_k, cloud)?;
    LatentVector::new(run_encoder(params, &prep).z)
}

/// Decodes a latent vector into the two folding stages.
pub fn decode(params: &AutoencoderParams, z: &LatentVector) -> Result<(PointCloud, PointCloud)> {
    if z.len() != params.arch.latent_dim {
        return Err(Error::Dimension {
            expected: params.arch.latent_dim,
            got: z.len(),
        });
    }
    let dec = run_decoder(params, z.values());
    Ok((PointCloud::new(dec.s1)?, PointCloud::new(dec.s2)?))
}

/// The training loss: `chamfer(s, s1) + chamfer(s, s2)`.
pub fn reconstruction_loss(s: &PointCloud, s1: &PointCloud, s2: &PointCloud) -> Result<f64> {
    Ok(crate::geometry::chamfer(s, s1)? + crate::geometry::chamfer(s, s2)?)
}

/// Loss pieces shared by diagnostics and the backward pass.
pub(crate) struct LossBits {
    pub loss: f64,
    pub ds1: Vec<[f64; 3]>,
    pub ds2: Vec<[f64; 3]>,
    pub corr_bytes: Vec<u8>,
}

pub(crate) fn loss_bits(s: &PointCloud, s1: &PointCloud, s2: &PointCloud) -> LossBits {
    let idx_s = NnIndex::new(s);
    let idx_s1 = NnIndex::new(s1);
    let idx_s2 = NnIndex::new(s2);
    let c_s_s1 = nn_correspondences(s, &idx_s1);
    let c_s1_s = nn_correspondences(s1, &idx_s);
    let c_s_s2 = nn_correspondences(s, &idx_s2);
    let c_s2_s = nn_correspondences(s2, &idx_s);
    let loss = (directed_mean(&c_s_s1) + directed_mean(&c_s1_s))
        + (directed_mean(&c_s_s2) + directed_mean(&c_s2_s));
    let ds1 = grad_from_correspondences(s1, s, &c_s1_s, &c_s_s1);
    let ds2 = grad_from_correspondences(s2, s, &c_s2_s, &c_s_s2);
    let mut corr_bytes = Vec::new();
    for list in [&c_s_s1, &c_s1_s, &c_s_s2, &c_s2_s] {
        for &(j, _) in list.iter() {
            corr_bytes.extend_from_slice(&(j as u32).to_le_bytes());
        }
    }
    LossBits {
        loss,
        ds1,
        ds2,
        corr_bytes,
    }
}

/// Hash over every argmax and nearest-neighbor choice made in one forward
/// pass. Two evaluations with equal hashes lie on the same smooth piece of
/// the loss, which is what finite-difference checks need to know.
pub(crate) fn structure_hash(enc: &EncTrace, corr_bytes: &[u8]) -> u64 {
    let mut bytes =
        Vec::with_capacity((enc.arg1.len() + enc.arg2.len() + enc.garg.len()) * 4 + corr_bytes.len());
    for table in [&enc.arg1, &enc.arg2, &enc.garg] {
        for &idx in table.iter() {
            bytes.extend_from_slice(&idx.to_le_bytes());
        }
    }
    bytes.extend_from_slice(corr_bytes);
    fnv1a(&bytes)
}

/// One full forward evaluation with diagnostics.
pub struct ForwardEval {
    pub loss: f64,
    pub latent: LatentVector,
    pub s1: PointCloud,
    pub s2: PointCloud,
    /// Fingerprint of the active nonsmooth structure (pool argmaxes and
    /// Chamfer correspondences).
    pub structure_hash: u64,
}

pub(crate) fn forward_prepared(
    params: &AutoencoderParams,
    prep: &PreparedCloud,
) -> Result<(EncTrace, DecTrace, LossBits)> {
    let enc = run_encoder(params, prep);
    if !enc.z.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("encoder output".into()));
    }
    let dec = run_decoder(params, &enc.z);
    let s1 = PointCloud::new(dec.s1.clone())?;
    let s2 = PointCloud::new(dec.s2.clone())?;
    let bits = loss_bits(&prep.cloud, &s1, &s2);
    Ok((enc, dec, bits))
}

pub fn forward_diagnostics(params: &AutoencoderParams, cloud: &PointCloud) -> Result<ForwardEval> {
    let prep = prepare_cloud(params.arch.knn_k, cloud)?;
    let (enc, dec, bits) = forward_prepared(params, &prep)?;
    let hash = structure_hash(&enc, &bits.corr_bytes);
    Ok(ForwardEval {
        loss: bits.loss,
        latent: LatentVector::new(enc.z)?,
        s1: PointCloud::new(dec.s1)?,
        s2: PointCloud::new(dec.s2)?,
        structure_hash: hash,
    })
}
