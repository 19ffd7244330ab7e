//! Flat key=value configuration files. Flags always override file entries.

use std::collections::HashMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Parsed `key=value` entries; later entries win over earlier duplicates.
/// Blank lines and lines starting with `#` are skipped.
pub struct ConfigMap {
    values: HashMap<String, String>,
}

impl ConfigMap {
    pub fn empty() -> ConfigMap {
        ConfigMap {
            values: HashMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<ConfigMap, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = HashMap::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected key=value, found {line:?}",
                    path.display(),
                    number + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigMap { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key}: {e}"))),
        }
    }
}

/// Flag value if present, else the config entry, else the default.
pub fn resolve<T: FromStr>(
    flag: Option<T>,
    cfg: &ConfigMap,
    key: &str,
    default: T,
) -> Result<T, CliError>
where
    T::Err: Display,
{
    match flag {
        Some(value) => Ok(value),
        None => Ok(cfg.get(key)?.unwrap_or(default)),
    }
}
