//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are the long
//! flag names, with `-` and `_` interchangeable. Values given on the command
//! line take precedence over the file, which takes precedence over defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{usage, CliError, CliResult};

/// Every key accepted in a config file.
pub const KNOWN_KEYS: &[&str] = &[
    "d",
    "subset",
    "subsets",
    "qber",
    "qber_f",
    "time_joint",
    "alice_marginal",
    "gap_tol",
    "feas_tol",
    "max_iter",
    "q_min",
    "q_max",
    "q_step",
    "cache_dir",
    "no_cache",
    "input",
    "symbol_rate",
    "p_mu",
    "p_nu",
    "p_omega",
    "lookup",
    "leakage",
    "ec_efficiency",
    "detector",
    "sat_max_rate",
    "sat_scale_rate",
    "eta_det",
    "dark_count",
    "intrinsic_error",
    "intrinsic_error_t",
    "intrinsic_error_f",
    "p_t",
    "intensity_min",
    "intensity_max",
    "loss_min",
    "loss_max",
    "loss_step",
    "mu",
    "nu",
    "omega",
    "format",
    "output",
];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", n + 1)))?;
            let key = normalize(k);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(usage(format!("config line {}: unknown key '{}'", n + 1, k.trim())));
            }
            values.insert(key, v.trim().trim_matches('"').to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if given, else the parsed config value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config key '{key}': cannot parse '{v}'"))),
        }
    }

    pub fn pick_or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.pick(flag, key)?
            .ok_or_else(|| usage(format!("missing required option --{}", key.replace('_', "-"))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_precedence() {
        let c = ConfigFile::parse("# comment\n d = 4\nqber-f=0.02\n\nsubset = \"0,2\"\n").unwrap();
        assert_eq!(c.pick::<usize>(None, "d").unwrap(), Some(4));
        assert_eq!(c.pick(Some(3usize), "d").unwrap(), Some(3));
        assert_eq!(c.pick::<f64>(None, "qber_f").unwrap(), Some(0.02));
        assert_eq!(c.raw("subset"), Some("0,2"));
        assert_eq!(c.pick_or(None, "qber", 0.1).unwrap(), 0.1);
        assert!(c.require::<f64>(None, "qber").is_err());
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(ConfigFile::parse("colour = blue").is_err());
        assert!(ConfigFile::parse("d 4").is_err());
        let c = ConfigFile::parse("d = four").unwrap();
        assert!(c.pick::<usize>(None, "d").is_err());
    }
}
