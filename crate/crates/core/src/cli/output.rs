use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::rational::Rationalization;

use super::config::RunConfig;

/// Collects output files and writes them from one place, in call order.
pub struct Writer {
    dir: PathBuf,
    written: Vec<String>,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(name, &s)
    }

    /// Writes `manifest.json` listing everything written so far.
    pub fn finish(mut self, config: &RunConfig, rationalizations: &[Rationalization], status: &str) -> Result<()> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            status,
            config,
            rationalizations,
            outputs: self.written.clone(),
        };
        self.json("manifest.json", &manifest)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    status: &'a str,
    config: &'a RunConfig,
    rationalizations: &'a [Rationalization],
    outputs: Vec<String>,
}

/// CSV-safe cell: commas and newlines are replaced.
pub fn cell(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

pub fn float(x: f64) -> String {
    format!("{x:.15e}")
}

pub fn short(x: f64) -> String {
    format!("{x:.6e}")
}
