//! Subcommand implementations.

pub mod benchmark;
pub mod evaluate;
pub mod extract;
pub mod fit;
pub mod gen;
pub mod project;
pub mod score;
pub mod train;

use crate::CliError;
use pcnd_core::ClassifierKind;

pub const ALL_KINDS: &str = "ocsvm,kpcand,deepsvdd,gods";

/// Parses a comma-separated classifier list; unknown names and duplicates
/// are usage errors.
pub fn parse_kinds(list: &str) -> Result<Vec<ClassifierKind>, CliError> {
    let mut kinds = Vec::new();
    for part in list.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(CliError::Usage(format!("empty entry in kind list {list:?}")));
        }
        let kind: ClassifierKind = part.parse().map_err(CliError::Usage)?;
        if kinds.contains(&kind) {
            return Err(CliError::Usage(format!("duplicate classifier kind {kind}")));
        }
        kinds.push(kind);
    }
    Ok(kinds)
}
