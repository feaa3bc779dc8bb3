//! Flat key=value run configuration.
//!
//! A config file mirrors the flags of the subcommand it is passed to, plus
//! the global `threads` and `log` keys. Command-line flags override file
//! values; keys the running subcommand does not define are rejected, so a
//! file written for one subcommand fails loudly when handed to another.

use crate::CliError;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

pub struct FileConfig {
    source: String,
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn empty() -> Self {
        Self {
            source: String::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let position = format!("{}:{}", path.display(), idx + 1);
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{position}: expected key=value, found {line:?}"
                )));
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Usage(format!("{position}: empty key")));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("{position}: duplicate key {key:?}")));
            }
        }
        Ok(Self {
            source: path.display().to_string(),
            values,
        })
    }
}

/// Merges command-line flags, config-file values, and built-in defaults,
/// recording every resolved value for the mandatory pre-run config log.
pub struct Resolver {
    file: FileConfig,
    resolved: Vec<(String, String)>,
}

impl Resolver {
    pub fn new(file: FileConfig) -> Self {
        Self {
            file,
            resolved: Vec::new(),
        }
    }

    /// Records an externally resolved value (the global flags).
    pub fn note(&mut self, key: &str, value: impl Display) {
        self.resolved.push((key.to_string(), value.to_string()));
    }

    /// Raw file value, consumed without parsing.
    pub fn take_raw(&mut self, key: &str) -> Option<String> {
        self.file.values.remove(key)
    }

    /// The `threads` global: flag wins, file value must still parse.
    pub fn global_usize(&mut self, key: &str, cli: Option<usize>) -> Result<Option<usize>, CliError> {
        self.merged(key, cli)
    }

    fn merged<T>(&mut self, key: &str, cli: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let from_file = match self.file.values.remove(key) {
            Some(raw) => Some(raw.parse::<T>().map_err(|e| {
                CliError::Usage(format!(
                    "{}: config key {key}: invalid value {raw:?}: {e}",
                    self.file.source
                ))
            })?),
            None => None,
        };
        Ok(cli.or(from_file))
    }

    pub fn required<T>(&mut self, key: &str, cli: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.merged(key, cli)? {
            Some(v) => {
                self.note(key, &v);
                Ok(v)
            }
            None => Err(CliError::Usage(format!(
                "missing --{key} (flag or config key)"
            ))),
        }
    }

    pub fn with_default<T>(&mut self, key: &str, cli: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.merged(key, cli)?.unwrap_or(default);
        self.note(key, &v);
        Ok(v)
    }

    pub fn optional<T>(&mut self, key: &str, cli: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.merged(key, cli)?;
        if let Some(v) = &v {
            self.note(key, v);
        }
        Ok(v)
    }

    /// Rejects unconsumed file keys and logs the resolved configuration.
    /// Every subcommand calls this before starting work.
    pub fn finish(&mut self, subcommand: &str) -> Result<(), CliError> {
        if let Some(key) = self.file.values.keys().next() {
            return Err(CliError::Usage(format!(
                "{}: unknown config key {key:?} for {subcommand}",
                self.file.source
            )));
        }
        let body: Vec<String> = self
            .resolved
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        log::info!("resolved config: {subcommand} {}", body.join(" "));
        Ok(())
    }
}
