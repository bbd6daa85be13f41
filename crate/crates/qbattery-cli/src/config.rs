//! Flat `key = value` config files. `#` starts a comment, blank lines are
//! ignored, unknown keys are rejected, and CLI flags override file values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Every key any subcommand understands. Parsing rejects keys outside this
/// list immediately; keys that the active subcommand does not consume are
/// rejected after merging.
const KNOWN_KEYS: &[&str] = &[
    "lambda",
    "R",
    "zeta1",
    "zeta2",
    "theta",
    "theta-pi",
    "phi",
    "phi-pi",
    "omega0",
    "output",
    "workers",
    "lt",
    "r-min",
    "r-max",
    "r-points",
    "lt-max",
    "lt-points",
    "densify",
    "theta-min",
    "theta-max",
    "theta-points",
    "zeta1-min",
    "zeta1-max",
    "zeta1-points",
    "a-min",
    "a-max",
    "a-points",
    "b-min",
    "b-max",
    "b-points",
    "tol-ode",
    "tol-eur",
    "tol-concurrence",
    "tol-eig",
    "tol-trace",
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parsed config file; entries are consumed as the run merges them so that
/// leftovers can be reported as inapplicable.
#[derive(Debug, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(ConfigMap { entries })
    }

    pub fn take_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| ConfigError(format!("key `{key}`: `{v}` is not a number"))),
        }
    }

    pub fn take_usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| ConfigError(format!("key `{key}`: `{v}` is not a nonnegative integer"))),
        }
    }

    pub fn take_string(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    /// Errors if any key was provided but never consumed by the active
    /// subcommand.
    pub fn finish(self, subcommand: &str) -> Result<(), ConfigError> {
        if let Some(key) = self.entries.keys().next() {
            return Err(ConfigError(format!(
                "key `{key}` is not applicable to the `{subcommand}` subcommand"
            )));
        }
        Ok(())
    }
}
