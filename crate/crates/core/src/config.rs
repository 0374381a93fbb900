//! Tunable parameters, read from `key = value` text.
//!
//! Unknown keys and out-of-range values are errors. `#` starts a comment
//! line. [`Config::render`] prints every key with its current value, which
//! parses back to the same configuration.

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::assoc::AssocParams;
use crate::melody::{DEFAULT_GRID_MS, DEFAULT_K};
use crate::metricspace::{CostModel, DEFAULT_D0, DEFAULT_D1, DEFAULT_MAX_ITER};
use crate::profile::RelevancyParams;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Base cluster radius.
    pub d0: f64,
    /// Search radius around medoids.
    pub d1: f64,
    /// Shortest intervals averaged into the IOI unit.
    pub k: usize,
    pub pattern_length: usize,
    pub top_patterns: usize,
    pub costs: CostModel,
    pub max_iter: usize,
    /// Onset grid for flattening, in ms.
    pub grid_ms: u64,
    pub assoc: AssocParams,
    pub relevancy: RelevancyParams,
    pub groups: usize,
    pub corpus: Option<PathBuf>,
    pub db: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            d0: DEFAULT_D0,
            d1: DEFAULT_D1,
            k: DEFAULT_K,
            pattern_length: 8,
            top_patterns: 3,
            costs: CostModel::UNIT,
            max_iter: DEFAULT_MAX_ITER,
            grid_ms: DEFAULT_GRID_MS,
            assoc: AssocParams::default(),
            relevancy: RelevancyParams::default(),
            groups: 3,
            corpus: None,
            db: PathBuf::from("tunefind.db"),
        }
    }
}

pub const KEYS: [&str; 22] = [
    "d0",
    "d1",
    "k",
    "pattern_length",
    "top_patterns",
    "insert_cost",
    "delete_cost",
    "substitute_cost",
    "max_iter",
    "grid_ms",
    "alpha",
    "beta",
    "gamma",
    "threshold",
    "rel_alpha",
    "rel_beta",
    "rel_gamma",
    "rel_delta",
    "rel_raw",
    "groups",
    "corpus",
    "db",
];

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut c = Config::default();
        c.apply(text)?;
        Ok(c)
    }

    /// Applies `key = value` lines on top of the current values.
    pub fn apply(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: &str| ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        let real = || -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0)
                .ok_or_else(|| bad("expected a finite non-negative number"))
        };
        let count = |min: usize| -> Result<usize, ConfigError> {
            value
                .parse::<usize>()
                .ok()
                .filter(|x| *x >= min)
                .ok_or_else(|| bad(&format!("expected an integer >= {min}")))
        };
        match key {
            "d0" => {
                self.d0 = real()?;
                if self.d0 == 0.0 {
                    return Err(bad("must be positive"));
                }
            }
            "d1" => self.d1 = real()?,
            "k" => self.k = count(1)?,
            "pattern_length" => self.pattern_length = count(1)?,
            "top_patterns" => self.top_patterns = count(1)?,
            "insert_cost" => self.costs.insert = real()?,
            "delete_cost" => self.costs.delete = real()?,
            "substitute_cost" => self.costs.substitute = real()?,
            "max_iter" => self.max_iter = count(0)?,
            "grid_ms" => self.grid_ms = count(1)? as u64,
            "alpha" => self.assoc.alpha = real()?,
            "beta" => self.assoc.beta = real()?,
            "gamma" => self.assoc.gamma = real()?,
            "threshold" => {
                self.assoc.threshold = real()?;
                if self.assoc.threshold > 1.0 {
                    return Err(bad("must be at most 1"));
                }
            }
            "rel_alpha" => self.relevancy.alpha = real()?,
            "rel_beta" => self.relevancy.beta = real()?,
            "rel_gamma" => self.relevancy.gamma = real()?,
            "rel_delta" => self.relevancy.delta = real()?,
            "rel_raw" => {
                self.relevancy.raw = value.parse().map_err(|_| bad("expected true or false"))?
            }
            "groups" => self.groups = count(1)?,
            "corpus" => self.corpus = (!value.is_empty()).then(|| PathBuf::from(value)),
            "db" => {
                if value.is_empty() {
                    return Err(bad("must not be empty"));
                }
                self.db = PathBuf::from(value)
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "d0" => self.d0.to_string(),
            "d1" => self.d1.to_string(),
            "k" => self.k.to_string(),
            "pattern_length" => self.pattern_length.to_string(),
            "top_patterns" => self.top_patterns.to_string(),
            "insert_cost" => self.costs.insert.to_string(),
            "delete_cost" => self.costs.delete.to_string(),
            "substitute_cost" => self.costs.substitute.to_string(),
            "max_iter" => self.max_iter.to_string(),
            "grid_ms" => self.grid_ms.to_string(),
            "alpha" => self.assoc.alpha.to_string(),
            "beta" => self.assoc.beta.to_string(),
            "gamma" => self.assoc.gamma.to_string(),
            "threshold" => self.assoc.threshold.to_string(),
            "rel_alpha" => self.relevancy.alpha.to_string(),
            "rel_beta" => self.relevancy.beta.to_string(),
            "rel_gamma" => self.relevancy.gamma.to_string(),
            "rel_delta" => self.relevancy.delta.to_string(),
            "rel_raw" => self.relevancy.raw.to_string(),
            "groups" => self.groups.to_string(),
            "corpus" => self
                .corpus
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            "db" => self.db.display().to_string(),
            _ => return None,
        })
    }

    pub fn render(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).expect("listed key")))
            .collect()
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parses_back() {
        let mut c = Config::default();
        c.set("d1", "2.5").unwrap();
        c.set("corpus", "/tmp/pages").unwrap();
        c.set("rel_raw", "true").unwrap();
        assert_eq!(Config::parse(&c.render()).unwrap(), c);
        assert_eq!(Config::parse(&Config::default().render()).unwrap(), Config::default());
    }

    #[test]
    fn defaults() {
        let text = Config::default().render();
        for line in ["d0 = 3", "d1 = 5", "k = 4", "pattern_length = 8", "alpha = 1", "beta = 0.1", "gamma = 0.05", "threshold = 0.01"] {
            assert!(text.lines().any(|l| l == line), "{line}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Config::parse("nope = 1"), Err(ConfigError::UnknownKey("nope".into())));
        assert_eq!(Config::parse("# c\nd0 1"), Err(ConfigError::Syntax { line: 2 }));
        assert!(matches!(Config::parse("d0 = 0"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(Config::parse("d1 = -1"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(Config::parse("k = 0"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(Config::parse("threshold = 2"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(Config::parse("d1 = inf"), Err(ConfigError::BadValue { .. })));
    }
}
