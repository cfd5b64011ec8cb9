//! Flat key-value experiment configuration: plain-text file, command-line
//! overrides win, unknown keys rejected.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

pub type CliResult<T> = Result<T, String>;

/// Resolved parameter source: optional config file plus flag overrides.
/// Every lookup records the key; keys present in the file but never looked
/// up are schema violations.
pub struct Params {
    file: BTreeMap<String, String>,
    queried: RefCell<HashSet<String>>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Params {
    pub fn load(config: Option<&Path>) -> CliResult<Self> {
        let mut file = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| format!("config line {} is not key=value: {line}", lineno + 1))?;
                file.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self {
            file,
            queried: RefCell::new(HashSet::new()),
            resolved: RefCell::new(BTreeMap::new()),
        })
    }

    fn raw(&self, key: &str) -> Option<String> {
        self.queried.borrow_mut().insert(key.to_string());
        self.file.get(key).cloned()
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    pub fn get_f64(&self, key: &str, flag: Option<f64>, default: f64) -> CliResult<f64> {
        let v = match (flag, self.raw(key)) {
            (Some(v), _) => v,
            (None, Some(s)) => s
                .parse()
                .map_err(|_| format!("config key {key}: expected a number, got {s}"))?,
            (None, None) => default,
        };
        self.record(key, format!("{v}"));
        Ok(v)
    }

    pub fn get_usize(&self, key: &str, flag: Option<usize>, default: usize) -> CliResult<usize> {
        let v = match (flag, self.raw(key)) {
            (Some(v), _) => v,
            (None, Some(s)) => s
                .parse()
                .map_err(|_| format!("config key {key}: expected an integer, got {s}"))?,
            (None, None) => default,
        };
        self.record(key, format!("{v}"));
        Ok(v)
    }

    pub fn get_u64(&self, key: &str, flag: Option<u64>, default: u64) -> CliResult<u64> {
        let v = match (flag, self.raw(key)) {
            (Some(v), _) => v,
            (None, Some(s)) => s
                .parse()
                .map_err(|_| format!("config key {key}: expected an integer, got {s}"))?,
            (None, None) => default,
        };
        self.record(key, format!("{v}"));
        Ok(v)
    }

    pub fn get_string(&self, key: &str, flag: Option<&str>, default: &str) -> CliResult<String> {
        let v = match (flag, self.raw(key)) {
            (Some(v), _) => v.to_string(),
            (None, Some(s)) => s,
            (None, None) => default.to_string(),
        };
        self.record(key, v.clone());
        Ok(v)
    }

    /// Comma-separated float list.
    pub fn get_list(&self, key: &str, flag: Option<&str>, default: &str) -> CliResult<Vec<f64>> {
        let text = self.get_string(key, flag, default)?;
        text.split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| format!("config key {key}: bad list entry {t}"))
            })
            .collect()
    }

    /// Rejects any file key that the experiment never consulted.
    pub fn reject_unknown(&self) -> CliResult<()> {
        let queried = self.queried.borrow();
        for key in self.file.keys() {
            if !queried.contains(key) {
                return Err(format!("unknown config key: {key}"));
            }
        }
        Ok(())
    }

    /// One `key = value` line per resolved parameter, for the summary.
    pub fn resolved_block(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.resolved.borrow().iter() {
            let _ = writeln!(out, "param {k} = {v}");
        }
        out
    }
}
