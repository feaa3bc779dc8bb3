//! Comma-separated dataset manifests with the fixed header `path,class,split`.
//!
//! The relative path doubles as the stable item id used by splitting, so
//! reordering manifest rows never changes downstream split assignments.

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::io::{read_pcb, read_xyz};
use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

pub const HEADER: &str = "path,class,split";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestRecord {
    pub path: String,
    pub class: String,
    pub split: Option<String>,
}

/// Eagerly validated record list; clouds are loaded lazily per record.
#[derive(Clone, Debug)]
pub struct Manifest {
    base_dir: PathBuf,
    records: Vec<ManifestRecord>,
}

impl Manifest {
    /// Reads and validates a manifest. Referenced files must exist under the
    /// manifest's directory.
    pub fn read(path: &Path) -> Result<Self> {
        let fail = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let file = std::fs::File::open(path)?;
        let mut lines = BufReader::new(file).lines().enumerate();
        match lines.next() {
            Some((_, Ok(first))) if first.trim_end() == HEADER => {}
            Some((_, Ok(first))) => {
                return Err(fail(1, format!("expected header {HEADER:?}, found {first:?}")))
            }
            Some((_, Err(e))) => return Err(Error::Io(e)),
            None => return Err(fail(0, "empty manifest".into())),
        }
        let mut records = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(fail(lineno, format!("expected 2 or 3 fields, found {}", fields.len())));
            }
            let rel = fields[0].trim();
            let class = fields[1].trim();
            if rel.is_empty() {
                return Err(fail(lineno, "empty path".into()));
            }
            if class.is_empty() {
                return Err(fail(lineno, "empty class label".into()));
            }
            if !seen.insert(rel.to_string()) {
                return Err(fail(lineno, format!("duplicate path {rel:?}")));
            }
            let split = fields
                .get(2)
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(String::from);
            let full = base_dir.join(rel);
            if !full.is_file() {
                return Err(fail(lineno, format!("referenced file not found: {}", full.display())));
            }
            records.push(ManifestRecord {
                path: rel.to_string(),
                class: class.to_string(),
                split,
            });
        }
        if records.is_empty() {
            return Err(fail(0, "manifest has no records".into()));
        }
        Ok(Self { base_dir, records })
    }

    /// Writes a manifest; the split field is emitted only when present.
    pub fn write(path: &Path, records: &[ManifestRecord]) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{HEADER}")?;
        for r in records {
            match &r.split {
                Some(tag) => writeln!(out, "{},{},{tag}", r.path, r.class)?,
                None => writeln!(out, "{},{}", r.path, r.class)?,
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn records(&self) -> &[ManifestRecord] {
        &self.records
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn class_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.class.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn classes(&self) -> Vec<String> {
        self.class_counts().into_keys().collect()
    }

    /// Loads one record's cloud, dispatching on the file extension
    /// (`.pcb` binary, anything else parsed as XYZ text).
    pub fn load_cloud(&self, record: &ManifestRecord) -> Result<PointCloud> {
        let full = self.base_dir.join(&record.path);
        if full.extension().is_some_and(|e| e == "pcb") {
            read_pcb(&full)
        } else {
            read_xyz(&full)
        }
    }
}
