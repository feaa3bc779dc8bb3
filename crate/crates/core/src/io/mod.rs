//! Dataset ingestion and persistence: point-cloud files, manifests, latent
//! banks. All binary formats are little-endian and platform-independent;
//! floats are stored as 32 bits on disk while computation stays in f64.

mod bank;
mod manifest;
mod pcb;
mod xyz;

pub use bank::LatentBank;
pub use manifest::{Manifest, ManifestRecord};
pub use pcb::{read_pcb, write_pcb};
pub use xyz::read_xyz;
