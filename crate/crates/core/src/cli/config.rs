//! Optional `key = value` config file. One assignment per line, `#` starts
//! a comment, blank lines are ignored, values may be wrapped in double
//! quotes. Keys are the long flag names with `-` or `_`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::error::{CliError, CliResult};

pub const KNOWN_KEYS: &[&str] = &[
    "family",
    "alpha",
    "level",
    "grid_size",
    "theta_min",
    "theta_max",
    "seed",
    "prior_seed",
    "input",
    "output",
    "columns",
    "strict_parse",
    "rerank",
    "fisher_cache",
    "fisher_draws",
    "fisher_nodes",
    "theta",
    "n",
    "replicates",
    "scatter",
    "no_delta",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    path: Option<PathBuf>,
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Unreadable {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, Some(path))
    }

    pub fn parse(text: &str, path: Option<&Path>) -> CliResult<Self> {
        let at = |line: usize, message: String| CliError::ConfigFile {
            path: path.map(Path::to_path_buf).unwrap_or_else(|| "<config>".into()),
            line,
            message,
        };
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(line_no, format!("expected key = value, got {line:?}")))?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(at(line_no, format!("unknown key {key:?}")));
            }
            let value = value.trim();
            let value = value
                .strip_prefix('"')
                .and_then(|v| v.strip_suffix('"'))
                .unwrap_or(value)
                .to_string();
            if entries.insert(key.clone(), (line_no, value)).is_some() {
                return Err(at(line_no, format!("duplicate key {key:?}")));
            }
        }
        Ok(Self {
            path: path.map(Path::to_path_buf),
            entries,
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    /// Typed value of `key`, if present.
    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e: T::Err| CliError::ConfigFile {
                path: self.path.clone().unwrap_or_else(|| "<config>".into()),
                line: *line,
                message: format!("invalid value {v:?} for {key}: {e}"),
            }),
        }
    }
}

/// A command-line value takes precedence over the config file.
pub fn pick<T: FromStr>(flag: Option<T>, config: &ConfigFile, key: &str) -> CliResult<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => config.get(key),
    }
}
