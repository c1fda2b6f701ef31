//! Output directory bookkeeping, CSV and plot-data writers and the run
//! manifest. Each file is written once and recorded once.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "UNTESTABLE-AT-SCALE")]
    Untestable,
    #[serde(rename = "SKIPPED")]
    Skipped,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Untestable => "UNTESTABLE-AT-SCALE",
            Status::Skipped => "SKIPPED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Task {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Task { name: name.into(), status, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub wall_time_s: f64,
    pub tasks: Vec<Task>,
    /// Every file the run wrote, relative to the output directory.
    pub files: Vec<String>,
    /// Command-specific results.
    pub details: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, cfg: &RunConfig, tasks: Vec<Task>, files: Vec<String>, details: serde_json::Value, wall: f64) -> Self {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
            wall_time_s: wall,
            tasks,
            files,
            details,
        }
    }

    pub fn any_fail(&self) -> bool {
        self.tasks.iter().any(|t| t.status == Status::Fail)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))
    }
}

pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn claim(&mut self, name: &str) -> Result<PathBuf> {
        if name == MANIFEST || self.files.iter().any(|f| f == name) {
            return Err(Error::InvalidArgument(format!("output {name} written twice")));
        }
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        self.files.push(name.to_string());
        Ok(path)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.claim(name)?;
        fs::write(path, bytes)?;
        Ok(())
    }

    /// CSV with a header row and LF line endings.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        self.write_bytes(name, &bytes)
    }

    /// Two-column numeric text, one `x y` pair per line after a `#` header.
    pub fn write_plot(&mut self, name: &str, columns: [&str; 2], points: &[(f64, f64)]) -> Result<()> {
        let mut s = format!("# {} {}\n", columns[0], columns[1]);
        for (x, y) in points {
            s.push_str(&format!("{} {}\n", num(*x), num(*y)));
        }
        self.write_bytes(name, s.as_bytes())
    }

    pub fn write_manifest(&self, m: &Manifest) -> Result<()> {
        let text = serde_json::to_string_pretty(m).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        fs::write(self.dir.join(MANIFEST), text + "\n")?;
        Ok(())
    }
}

/// Shortest round-trip float text.
pub fn num(v: f64) -> String {
    // −0 prints as 0
    format!("{:e}", v + 0.0)
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Equal-width histogram of `values` on [0, max]; (bin centre, count).
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64)> {
    let max = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let width = if max > 0.0 { max / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for v in values.iter().filter(|v| v.is_finite()) {
        let b = ((v / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts.iter().enumerate().map(|(b, c)| ((b as f64 + 0.5) * width, *c as f64)).collect()
}
