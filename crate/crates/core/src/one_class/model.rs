//! Unified model wrapper and the OCM1 model file format.
//!
//! OCM1 layout: magic `OCM1`, u16 version, u8 kind tag, a kernel block
//! (u8 code plus f64 parameter; code 255 means the model has no kernel),
//! the kind-specific payload as little-endian f64s, and a trailing u64
//! FNV-1a checksum over every preceding byte. Model weights are stored at
//! full f64 width, so a round trip reproduces scores bit for bit.

use super::gods::GodsModel;
use super::kernel::KernelSpec;
use super::kpca::KpcaNdModel;
use super::ocsvm::OcSvmModel;
use super::svdd::DeepSvddModel;
use super::{score_deepsvdd, score_gods, score_kpcand, score_ocsvm};
use crate::binio::{ChecksumWriter, Reader, Writer};
use crate::error::{Error, Result};
use crate::rng::fnv1a;
use nalgebra::DMatrix;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read};
use std::path::Path;
use std::str::FromStr;

const MAGIC: &[u8; 4] = b"OCM1";
const VERSION: u16 = 1;

const KERNEL_LINEAR: u8 = 0;
const KERNEL_RBF: u8 = 1;
const KERNEL_GAUSSIAN: u8 = 2;
const KERNEL_NONE: u8 = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassifierKind {
    OcSvm,
    KpcaNd,
    DeepSvdd,
    Gods,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::OcSvm,
        ClassifierKind::KpcaNd,
        ClassifierKind::DeepSvdd,
        ClassifierKind::Gods,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::OcSvm => "ocsvm",
            ClassifierKind::KpcaNd => "kpcand",
            ClassifierKind::DeepSvdd => "deepsvdd",
            ClassifierKind::Gods => "gods",
        }
    }

    fn tag(self) -> u8 {
        match self {
            ClassifierKind::OcSvm => 0,
            ClassifierKind::KpcaNd => 1,
            ClassifierKind::DeepSvdd => 2,
            ClassifierKind::Gods => 3,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ClassifierKind::OcSvm),
            1 => Some(ClassifierKind::KpcaNd),
            2 => Some(ClassifierKind::DeepSvdd),
            3 => Some(ClassifierKind::Gods),
            _ => None,
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ocsvm" => Ok(ClassifierKind::OcSvm),
            "kpcand" => Ok(ClassifierKind::KpcaNd),
            "deepsvdd" => Ok(ClassifierKind::DeepSvdd),
            "gods" => Ok(ClassifierKind::Gods),
            _ => Err(format!(
                "unknown classifier kind {s:?}; expected ocsvm, kpcand, deepsvdd, or gods"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub enum OneClassModel {
    OcSvm(OcSvmModel),
    KpcaNd(KpcaNdModel),
    DeepSvdd(DeepSvddModel),
    Gods(GodsModel),
}

impl OneClassModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            OneClassModel::OcSvm(_) => ClassifierKind::OcSvm,
            OneClassModel::KpcaNd(_) => ClassifierKind::KpcaNd,
            OneClassModel::DeepSvdd(_) => ClassifierKind::DeepSvdd,
            OneClassModel::Gods(_) => ClassifierKind::Gods,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OneClassModel::OcSvm(m) => m.dim(),
            OneClassModel::KpcaNd(m) => m.dim(),
            OneClassModel::DeepSvdd(m) => m.dim(),
            OneClassModel::Gods(m) => m.dim(),
        }
    }

    /// Anomaly score; higher is more anomalous for every kind.
    pub fn score(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.dim());
        match self {
            OneClassModel::OcSvm(m) => score_ocsvm(m, z),
            OneClassModel::KpcaNd(m) => score_kpcand(m, z),
            OneClassModel::DeepSvdd(m) => score_deepsvdd(m, z),
            OneClassModel::Gods(m) => score_gods(m, z),
        }
    }
}

fn kernel_block(k: Option<&KernelSpec>) -> (u8, f64) {
    match k {
        None => (KERNEL_NONE, 0.0),
        Some(KernelSpec::Linear) => (KERNEL_LINEAR, 0.0),
        Some(KernelSpec::Rbf { gamma }) => (KERNEL_RBF, *gamma),
        Some(KernelSpec::Gaussian { sigma }) => (KERNEL_GAUSSIAN, *sigma),
    }
}

pub fn save_model(path: &Path, model: &OneClassModel) -> Result<()> {
    let mut sink = ChecksumWriter::new();
    {
        let mut w = Writer::new(&mut sink);
        w.bytes(MAGIC)?;
        w.u16(VERSION)?;
        w.u8(model.kind().tag())?;
        let kernel = match model {
            OneClassModel::OcSvm(m) => Some(&m.kernel),
            OneClassModel::KpcaNd(m) => Some(&m.kernel),
            _ => None,
        };
        let (code, param) = kernel_block(kernel);
        w.u8(code)?;
        w.f64(param)?;
        match model {
            OneClassModel::OcSvm(m) => {
                w.u32(m.dim() as u32)?;
                w.u32(m.support.len() as u32)?;
                for row in &m.support {
                    for &v in row {
                        w.f64(v)?;
                    }
                }
                for &a in &m.alpha {
                    w.f64(a)?;
                }
                w.f64(m.rho)?;
                w.f64(m.w_norm)?;
            }
            OneClassModel::KpcaNd(m) => {
                w.u32(m.dim() as u32)?;
                w.u32(m.rows.len() as u32)?;
                w.u32(m.lambdas.len() as u32)?;
                for row in &m.rows {
                    for &v in row {
                        w.f64(v)?;
                    }
                }
                for &l in &m.lambdas {
                    w.f64(l)?;
                }
                for c in &m.coeffs {
                    for &v in c {
                        w.f64(v)?;
                    }
                }
                for &v in &m.row_means {
                    w.f64(v)?;
                }
                w.f64(m.total_mean)?;
            }
            OneClassModel::DeepSvdd(m) => {
                w.u32(m.input_dim as u32)?;
                w.u32(m.widths.len() as u32)?;
                for &width in &m.widths {
                    w.u32(width as u32)?;
                }
                for layer in &m.weights {
                    for &v in layer {
                        w.f64(v)?;
                    }
                }
                for &c in &m.center {
                    w.f64(c)?;
                }
                w.f64(m.radius)?;
                w.f64(m.nu)?;
            }
            OneClassModel::Gods(m) => {
                w.u32(m.dim() as u32)?;
                w.u32(m.planes() as u32)?;
                for &v in m.w1.as_slice() {
                    w.f64(v)?;
                }
                for &v in m.w2.as_slice() {
                    w.f64(v)?;
                }
                for &v in &m.b1 {
                    w.f64(v)?;
                }
                for &v in &m.b2 {
                    w.f64(v)?;
                }
                w.f64(m.eta)?;
            }
        }
        w.finish()?;
    }
    let checksum = fnv1a(&sink.buf);
    let mut out = Writer::new(BufWriter::new(File::create(path)?));
    out.bytes(&sink.buf)?;
    out.u64(checksum)?;
    out.finish()
}

fn read_kernel(r: &mut Reader<impl Read>) -> Result<Option<KernelSpec>> {
    let code = r.u8()?;
    let param = r.f64()?;
    let spec = match code {
        KERNEL_NONE => None,
        KERNEL_LINEAR => Some(KernelSpec::Linear),
        KERNEL_RBF => Some(KernelSpec::Rbf { gamma: param }),
        KERNEL_GAUSSIAN => Some(KernelSpec::Gaussian { sigma: param }),
        _ => return Err(r.fail(format!("unknown kernel code {code}"))),
    };
    if let Some(k) = &spec {
        k.validate().map_err(|e| r.fail(e.to_string()))?;
    }
    Ok(spec)
}

fn f64_vec_finite(r: &mut Reader<impl Read>, n: usize, what: &str) -> Result<Vec<f64>> {
    let values = r.f64_vec(n)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(r.fail(format!("non-finite {what}")));
    }
    Ok(values)
}

fn rows_from_flat(flat: Vec<f64>, n: usize, d: usize) -> Vec<Vec<f64>> {
    flat.chunks_exact(d).map(<[f64]>::to_vec).take(n).collect()
}

pub fn load_model(path: &Path) -> Result<OneClassModel> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            offset: 0,
            msg: "file too short for a checksum".into(),
        });
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().unwrap());
    if fnv1a(body) != stored {
        return Err(Error::Format {
            path: path.to_path_buf(),
            offset: body.len() as u64,
            msg: "checksum mismatch".into(),
        });
    }

    let mut r = Reader::new(body, path);
    r.magic(MAGIC, "one-class model")?;
    let version = r.u16()?;
    if version != VERSION {
        return Err(r.fail(format!("unsupported version {version}")));
    }
    let tag = r.u8()?;
    let kind =
        ClassifierKind::from_tag(tag).ok_or_else(|| r.fail(format!("unknown model kind {tag}")))?;
    let kernel = read_kernel(&mut r)?;

    let model = match kind {
        ClassifierKind::OcSvm => {
            let kernel = kernel.ok_or_else(|| r.fail("model kind requires a kernel"))?;
            let d = r.u32()? as usize;
            let n_sv = r.u32()? as usize;
            if d == 0 || n_sv == 0 {
                return Err(r.fail("empty support set"));
            }
            let flat = f64_vec_finite(&mut r, n_sv * d, "support vector")?;
            let support = rows_from_flat(flat, n_sv, d);
            let alpha = f64_vec_finite(&mut r, n_sv, "alpha")?;
            let rho = r.f64()?;
            let w_norm = r.f64()?;
            if !rho.is_finite() || !(w_norm.is_finite() && w_norm > 0.0) {
                return Err(r.fail("invalid threshold or norm"));
            }
            OneClassModel::OcSvm(OcSvmModel {
                kernel,
                support,
                alpha,
                rho,
                w_norm,
            })
        }
        ClassifierKind::KpcaNd => {
            let kernel = kernel.ok_or_else(|| r.fail("model kind requires a kernel"))?;
            let d = r.u32()? as usize;
            let n = r.u32()? as usize;
            let q = r.u32()? as usize;
            if d == 0 || n < 2 || q == 0 || q > n {
                return Err(r.fail("inconsistent dimensions"));
            }
            let flat = f64_vec_finite(&mut r, n * d, "training row")?;
            let rows = rows_from_flat(flat, n, d);
            let lambdas = f64_vec_finite(&mut r, q, "eigenvalue")?;
            if lambdas.iter().any(|&l| l <= 0.0) {
                return Err(r.fail("non-positive eigenvalue"));
            }
            let flat = f64_vec_finite(&mut r, q * n, "coefficient")?;
            let coeffs = rows_from_flat(flat, q, n);
            let row_means = f64_vec_finite(&mut r, n, "row mean")?;
            let total_mean = r.f64()?;
            if !total_mean.is_finite() {
                return Err(r.fail("non-finite grand mean"));
            }
            OneClassModel::KpcaNd(KpcaNdModel {
                kernel,
                rows,
                lambdas,
                coeffs,
                row_means,
                total_mean,
            })
        }
        ClassifierKind::DeepSvdd => {
            if kernel.is_some() {
                return Err(r.fail("unexpected kernel block"));
            }
            let d = r.u32()? as usize;
            let n_layers = r.u32()? as usize;
            if d == 0 || n_layers == 0 {
                return Err(r.fail("inconsistent dimensions"));
            }
            let mut widths = Vec::with_capacity(n_layers);
            for _ in 0..n_layers {
                let width = r.u32()? as usize;
                if width == 0 {
                    return Err(r.fail("zero layer width"));
                }
                widths.push(width);
            }
            let mut weights = Vec::with_capacity(n_layers);
            let mut fan_in = d;
            for &width in &widths {
                weights.push(f64_vec_finite(&mut r, width * fan_in, "weight")?);
                fan_in = width;
            }
            let center = f64_vec_finite(&mut r, *widths.last().unwrap(), "center")?;
            let radius = r.f64()?;
            let nu = r.f64()?;
            if !(radius.is_finite() && radius >= 0.0) || !(nu > 0.0 && nu <= 1.0) {
                return Err(r.fail("invalid radius or nu"));
            }
            OneClassModel::DeepSvdd(DeepSvddModel {
                input_dim: d,
                widths,
                weights,
                center,
                radius,
                nu,
            })
        }
        ClassifierKind::Gods => {
            if kernel.is_some() {
                return Err(r.fail("unexpected kernel block"));
            }
            let d = r.u32()? as usize;
            let m = r.u32()? as usize;
            if d == 0 || m == 0 || m > d {
                return Err(r.fail("inconsistent dimensions"));
            }
            let w1 = DMatrix::from_column_slice(d, m, &f64_vec_finite(&mut r, d * m, "frame")?);
            let w2 = DMatrix::from_column_slice(d, m, &f64_vec_finite(&mut r, d * m, "frame")?);
            let b1 = f64_vec_finite(&mut r, m, "offset")?;
            let b2 = f64_vec_finite(&mut r, m, "offset")?;
            let eta = r.f64()?;
            if !(eta.is_finite() && eta > 0.0) {
                return Err(r.fail("invalid eta"));
            }
            OneClassModel::Gods(GodsModel { w1, w2, b1, b2, eta })
        }
    };
    r.expect_eof()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::super::{
        fit_deepsvdd, fit_gods, fit_kpcand, fit_ocsvm, DeepSvddConfig, GodsConfig,
    };
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn random_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = stream_rng(seed, &[61]);
        (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect()
    }

    fn fitted_models() -> Vec<OneClassModel> {
        let rows = random_rows(12, 4, 1);
        vec![
            OneClassModel::OcSvm(
                fit_ocsvm(&rows, 0.5, KernelSpec::Rbf { gamma: 0.8 }).unwrap(),
            ),
            OneClassModel::KpcaNd(
                fit_kpcand(&rows, KernelSpec::Gaussian { sigma: 1.3 }, 3).unwrap(),
            ),
            OneClassModel::DeepSvdd(
                fit_deepsvdd(
                    &rows,
                    &DeepSvddConfig {
                        epochs: 5,
                        ..Default::default()
                    },
                )
                .unwrap(),
            ),
            OneClassModel::Gods(
                fit_gods(
                    &rows,
                    &GodsConfig {
                        m: 2,
                        iters: 20,
                        ..Default::default()
                    },
                )
                .unwrap(),
            ),
        ]
    }

    fn rewrite(path: &Path, patch: impl FnOnce(&mut Vec<u8>)) {
        let mut bytes = std::fs::read(path).unwrap();
        bytes.truncate(bytes.len() - 8);
        patch(&mut bytes);
        let sum = fnv1a(&bytes);
        bytes.extend_from_slice(&sum.to_le_bytes());
        std::fs::write(path, bytes).unwrap();
    }

    #[test]
    fn round_trip_reproduces_scores_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let probes = random_rows(10, 4, 2);
        for (i, model) in fitted_models().into_iter().enumerate() {
            let path = dir.path().join(format!("model_{i}.ocm"));
            save_model(&path, &model).unwrap();
            let loaded = load_model(&path).unwrap();
            assert_eq!(loaded.kind(), model.kind());
            assert_eq!(loaded.dim(), 4);
            for z in &probes {
                assert_eq!(
                    model.score(z).to_bits(),
                    loaded.score(z).to_bits(),
                    "kind {} probe {z:?}",
                    model.kind()
                );
            }
        }
    }

    #[test]
    fn flipped_byte_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ocm");
        save_model(&path, &fitted_models()[0]).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        std::fs::write(&path, bytes).unwrap();
        let err = load_model(&path).unwrap_err();
        assert!(err.to_string().contains("checksum"), "{err}");
    }

    #[test]
    fn truncated_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ocm");
        save_model(&path, &fitted_models()[1]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 9]).unwrap();
        assert!(load_model(&path).is_err());
        std::fs::write(&path, &bytes[..4]).unwrap();
        assert!(load_model(&path).is_err());
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ocm");
        save_model(&path, &fitted_models()[0]).unwrap();
        rewrite(&path, |b| b[..4].copy_from_slice(b"XXXX"));
        let err = load_model(&path).unwrap_err();
        assert!(err.to_string().contains("bad magic"), "{err}");
    }

    #[test]
    fn unknown_version_and_kind_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ocm");
        save_model(&path, &fitted_models()[0]).unwrap();
        rewrite(&path, |b| b[4] = 9);
        assert!(load_model(&path)
            .unwrap_err()
            .to_string()
            .contains("unsupported version"));

        save_model(&path, &fitted_models()[0]).unwrap();
        rewrite(&path, |b| b[6] = 7);
        assert!(load_model(&path)
            .unwrap_err()
            .to_string()
            .contains("unknown model kind"));
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ClassifierKind::ALL {
            let parsed: ClassifierKind = kind.name().parse().unwrap();
            assert_eq!(parsed, kind);
            assert_eq!(kind.to_string(), kind.name());
        }
        assert!("svm".parse::<ClassifierKind>().is_err());
    }
}
