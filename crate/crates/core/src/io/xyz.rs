//! Plain-text point clouds: one `x y z` triple per line.

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use std::io::{BufRead, BufReader};
use std::path::Path;

/// Reads a whitespace-separated XYZ file. Blank lines and lines starting with
/// `#` are skipped.
pub fn read_xyz(path: &Path) -> Result<PointCloud> {
    let parse_fail = |line: usize, msg: &str| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    };
    let file = std::fs::File::open(path)?;
    let mut points = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_fail(
                lineno,
                &format!("expected 3 coordinates, found {}", fields.len()),
            ));
        }
        let mut p = [0.0f64; 3];
        for (slot, field) in p.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| parse_fail(lineno, &format!("invalid number {field:?}")))?;
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(parse_fail(0, "no points"));
    }
    PointCloud::new(points)
}
