//! CSV and summary artifacts. Floats go through `Display`, which emits the
//! shortest decimal that round-trips, so identical runs produce identical
//! bytes regardless of worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::CliResult;

pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "pass".into() } else { "fail".into() })
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(v) => write!(f, "{v}"),
        }
    }
}

pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        fs::write(path, out).map_err(|e| format!("cannot write {}: {e}", path.display()))
    }
}

/// Accumulates the structured-text summary. Every experiment reports the
/// statement it exercises, the resolved parameters, the seed, per-item
/// verdicts and an overall verdict.
pub struct Summary {
    name: String,
    lines: Vec<String>,
    pub all_pass: bool,
}

impl Summary {
    pub fn new(name: &str, statement: &str) -> Self {
        Self {
            name: name.to_string(),
            lines: vec![format!("experiment = {name}"), format!("statement = {statement}")],
            all_pass: true,
        }
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key} = {value}"));
    }

    pub fn estimate(&mut self, key: &str, value: f64, half_width: f64) {
        self.lines.push(format!("{key} = {value} +- {half_width}"));
    }

    pub fn verdict(&mut self, label: &str, pass: bool) {
        self.all_pass &= pass;
        self.lines.push(format!("verdict {label} = {}", if pass { "pass" } else { "fail" }));
    }

    pub fn write(
        &self,
        dir: &Path,
        params_block: &str,
        seed: u64,
        wall: std::time::Duration,
    ) -> CliResult<PathBuf> {
        let mut out = String::new();
        for line in &self.lines {
            let _ = writeln!(out, "{line}");
        }
        out.push_str(params_block);
        let _ = writeln!(out, "seed = {seed}");
        let _ = writeln!(out, "wall_seconds = {:.3}", wall.as_secs_f64());
        let _ = writeln!(out, "overall = {}", if self.all_pass { "pass" } else { "fail" });
        let path = dir.join(format!("{}.summary.txt", self.name));
        fs::write(&path, out).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        Ok(path)
    }
}
