//! Self-describing output files: every CSV and JSON report carries the
//! resolved config and seed, and each run ends with a manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::RunError;

/// One CSV cell.
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(u64::from(v))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            // Debug prints the shortest string that parses back to the same f64.
            Cell::Float(v) => write!(out, "{v:?}").unwrap(),
            Cell::Bool(v) => write!(out, "{v}").unwrap(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap(),
            Cell::Text(s) => out.push_str(s),
            Cell::Empty => {}
        }
    }
}

pub struct Outputs {
    dir: PathBuf,
    command: String,
    preset: Option<String>,
    config: Value,
    seed: Option<u64>,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path, command: &str, preset: Option<&str>, cfg: &ExperimentConfig) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            preset: preset.map(str::to_string),
            config: serde_json::to_value(cfg).expect("config serializes"),
            seed: cfg.seed,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<PathBuf, RunError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(path)
    }

    /// CSV with `#` comment lines naming the command, config and seed, then a header row.
    pub fn csv(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<Cell>>) -> Result<PathBuf, RunError> {
        let mut out = String::new();
        writeln!(out, "# haarwalk {}", self.command).unwrap();
        if let Some(p) = &self.preset {
            writeln!(out, "# preset: {p}").unwrap();
        }
        writeln!(out, "# config: {}", self.config).unwrap();
        match self.seed {
            Some(s) => writeln!(out, "# seed: {s}").unwrap(),
            None => writeln!(out, "# seed: none").unwrap(),
        }
        writeln!(out, "{}", columns.join(",")).unwrap();
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.render(&mut out);
            }
            out.push('\n');
        }
        self.write(name, &out)
    }

    /// Pretty JSON `{command, preset, seed, config, report}`.
    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<PathBuf, RunError> {
        let v = json!({
            "command": self.command,
            "preset": self.preset,
            "seed": self.seed,
            "config": self.config,
            "report": report,
        });
        let body = serde_json::to_string_pretty(&v).expect("report serializes") + "\n";
        self.write(name, &body)
    }

    /// Writes `<stem>.manifest.json` listing every file of the run.
    pub fn manifest(mut self, stem: &str, exit_code: i32, summary: Value) -> Result<Vec<PathBuf>, RunError> {
        let v = json!({
            "tool": "haarwalk",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "preset": self.preset,
            "seed": self.seed,
            "config": self.config,
            "outputs": self.files,
            "exit_code": exit_code,
            "summary": summary,
        });
        let body = serde_json::to_string_pretty(&v).expect("manifest serializes") + "\n";
        self.write(&format!("{stem}.manifest.json"), &body)?;
        Ok(self.files.iter().map(|f| self.dir.join(f)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_render_round_trip_values() {
        let mut s = String::new();
        for c in [Cell::from(0.1), Cell::from(1e-300), Cell::from(2.0), Cell::from(None::<u64>), Cell::Text("a,b".into())] {
            c.render(&mut s);
            s.push('|');
        }
        assert_eq!(s, "0.1|1e-300|2.0||\"a,b\"|");
        assert_eq!("1e-300".parse::<f64>().unwrap(), 1e-300);
    }
}
