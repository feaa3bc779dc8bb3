//! Latent banks: the frozen extractor's output for a labeled dataset.
//!
//! LTB1 layout: magic `LTB1`, u32 dim, u32 count, u64 extractor fingerprint,
//! then per item a u32-length-prefixed id and label, then count x dim f32 rows.

use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::io::{BufReader, BufWriter};
use std::path::Path;

const MAGIC: &[u8; 4] = b"LTB1";
const MAX_STR: u32 = 1 << 20;

#[derive(Clone, Debug)]
pub struct LatentBank {
    dim: usize,
    fingerprint: u64,
    ids: Vec<String>,
    labels: Vec<String>,
    rows: Vec<f32>,
    by_id: HashMap<String, usize>,
}

impl LatentBank {
    pub fn new(dim: usize, fingerprint: u64) -> Self {
        Self {
            dim,
            fingerprint,
            ids: Vec::new(),
            labels: Vec::new(),
            rows: Vec::new(),
            by_id: HashMap::new(),
        }
    }

    pub fn push(&mut self, id: &str, label: &str, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: row.len(),
            });
        }
        if self.by_id.contains_key(id) {
            return Err(Error::Degenerate(format!("duplicate bank id {id:?}")));
        }
        self.by_id.insert(id.to_string(), self.ids.len());
        self.ids.push(id.to_string());
        self.labels.push(label.to_string());
        self.rows.extend(row.iter().map(|&v| v as f32));
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn row_f32(&self, i: usize) -> &[f32] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_f64(&self, i: usize) -> Vec<f64> {
        self.row_f32(i).iter().map(|&v| v as f64).collect()
    }

    /// Selected rows widened to f64, in the order given.
    pub fn rows_for(&self, indices: &[usize]) -> Vec<Vec<f64>> {
        indices.iter().map(|&i| self.row_f64(i)).collect()
    }

    /// Distinct class labels, sorted.
    pub fn classes(&self) -> Vec<String> {
        let mut cs: Vec<String> = self.labels.clone();
        cs.sort();
        cs.dedup();
        cs
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = Writer::new(BufWriter::new(std::fs::File::create(path)?));
        w.bytes(MAGIC)?;
        w.u32(self.dim as u32)?;
        w.u32(self.len() as u32)?;
        w.u64(self.fingerprint)?;
        for (id, label) in self.ids.iter().zip(&self.labels) {
            w.string(id)?;
            w.string(label)?;
        }
        for &v in &self.rows {
            w.f32(v)?;
        }
        w.finish()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = Reader::new(BufReader::new(std::fs::File::open(path)?), path);
        r.magic(MAGIC, "LTB1")?;
        let dim = r.u32()? as usize;
        let count = r.u32()? as usize;
        if dim == 0 {
            return Err(r.fail("zero latent dimension"));
        }
        let fingerprint = r.u64()?;
        let mut bank = Self::new(dim, fingerprint);
        let mut pairs = Vec::with_capacity(count);
        for _ in 0..count {
            let id = r.string(MAX_STR)?;
            let label = r.string(MAX_STR)?;
            pairs.push((id, label));
        }
        for (id, label) in pairs {
            let row = r.f32_vec(dim)?;
            if bank.by_id.contains_key(&id) {
                return Err(r.fail(format!("duplicate id {id:?}")));
            }
            bank.by_id.insert(id.clone(), bank.ids.len());
            bank.ids.push(id);
            bank.labels.push(label);
            bank.rows.extend_from_slice(&row);
        }
        r.expect_eof()?;
        Ok(bank)
    }
}
