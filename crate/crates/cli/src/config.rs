//! `key = value` configuration files and flag/config/default resolution.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Bad input: exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub const KEYS: &[&str] = &[
    "threads", "output", "from", "to", "samples", "iters", "edge", "s", "theta", "steps", "value", "tan", "x0",
    "depth", "lambda", "mu", "backend", "g1", "g2", "t_end", "rtol", "atol", "dt", "seed", "renorm_depth",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(UsageError(format!("config line {}: expected key=value", n + 1)));
            };
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(UsageError(format!("config line {}: unknown key {key:?}", n + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag, then config entry, then `default`.
    pub fn pick<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> anyhow::Result<T> {
        Ok(self.pick_opt(key, flag)?.unwrap_or(default))
    }

    pub fn pick_opt<T: FromStr>(&self, key: &str, flag: Option<T>) -> anyhow::Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config: bad value {v:?} for {key}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_config_beats_default() {
        let c = Config::parse("# sweep\nsamples = 40\nrtol=1e-9\n").unwrap();
        assert_eq!(c.pick("samples", Some(7usize), 1).unwrap(), 7);
        assert_eq!(c.pick("samples", None, 1usize).unwrap(), 40);
        assert_eq!(c.pick("iters", None, 5usize).unwrap(), 5);
        assert_eq!(c.pick("rtol", None, 0.0f64).unwrap(), 1e-9);
    }

    #[test]
    fn rejects_unknown_keys_and_garbage() {
        assert!(Config::parse("samplez = 3").is_err());
        assert!(Config::parse("samples").is_err());
        let c = Config::parse("samples = many").unwrap();
        assert!(c.pick::<usize>("samples", None, 1).is_err());
    }
}
