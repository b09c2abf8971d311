//! Plain-text tables with a commented metadata header.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// A CSV table whose first lines are `# key: value` comments.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { meta: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:.10e}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

/// Hex SHA-256 of a byte string (used to tag outputs with their producing config).
pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Files staged in memory and written together at the end of a run.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(PathBuf, String)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<PathBuf>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn names(&self) -> Vec<&Path> {
        self.files.iter().map(|(p, _)| p.as_path()).collect()
    }

    /// Write every file into `dir` through a temporary name and a rename.
    pub fn commit(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut staged = Vec::new();
        for (name, contents) in &self.files {
            let target = dir.join(name);
            let tmp = dir.join(format!(".{}.partial", name.display()));
            std::fs::write(&tmp, contents)?;
            staged.push((tmp, target));
        }
        let mut written = Vec::new();
        for (tmp, target) in staged {
            std::fs::rename(&tmp, &target)?;
            written.push(target);
        }
        Ok(written)
    }
}
