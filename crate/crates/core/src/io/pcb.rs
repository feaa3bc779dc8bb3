//! PCB binary point clouds: magic `PCB1`, u32 point count, count x 3 f32.

use crate::binio::{Reader, Writer};
use crate::error::Result;
use crate::geometry::PointCloud;
use std::io::{BufReader, BufWriter};
use std::path::Path;

const MAGIC: &[u8; 4] = b"PCB1";

pub fn write_pcb(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut w = Writer::new(BufWriter::new(std::fs::File::create(path)?));
    w.bytes(MAGIC)?;
    w.u32(cloud.len() as u32)?;
    for p in cloud.points() {
        for &v in p {
            w.f32(v as f32)?;
        }
    }
    w.finish()
}

pub fn read_pcb(path: &Path) -> Result<PointCloud> {
    let mut r = Reader::new(BufReader::new(std::fs::File::open(path)?), path);
    r.magic(MAGIC, "PCB")?;
    let count = r.u32()? as usize;
    if count == 0 {
        return Err(r.fail("zero points"));
    }
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let raw = r.f32_vec(3)?;
        points.push([raw[0] as f64, raw[1] as f64, raw[2] as f64]);
    }
    r.expect_eof()?;
    PointCloud::new(points)
}
