use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use kicktop::experiments::ExperimentConfig;
use serde::Serialize;

use crate::CliError;

pub const SWEEP_HEADER: &[&str] = &[
    "scenario",
    "state",
    "axis",
    "j",
    "kappa0",
    "n",
    "T",
    "metric",
    "mean",
    "second_moment",
];
pub const CONTOUR_HEADER: &[&str] = &["scenario", "t_alpha", "kappa0", "metric", "value"];
pub const INDICATOR_HEADER: &[&str] = &[
    "kappa0",
    "indicator",
    "cycle_stable",
    "cycle_return",
    "pole_excursion",
    "pole_diverged",
];
pub const BOUNDARY_HEADER: &[&str] = &["index", "kappa0"];
pub const ORBIT_HEADER: &[&str] = &["orbit", "kappa0", "step", "x", "y", "z"];

#[derive(Debug, Serialize)]
pub struct BoundaryRow {
    pub index: usize,
    pub kappa0: f64,
}

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|source| CliError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes `rows` under `header` and returns `(name, row count)`. The
    /// header is written even when `rows` is empty.
    pub fn write_rows<T: Serialize>(
        &self,
        name: &str,
        header: &[&str],
        rows: &[T],
    ) -> Result<(String, usize), CliError> {
        let path = self.path(name);
        let csv_err = |source| CliError::Csv {
            path: path.clone(),
            source,
        };
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(&path)
            .map_err(csv_err)?;
        writer.write_record(header).map_err(csv_err)?;
        for row in rows {
            writer.serialize(row).map_err(csv_err)?;
        }
        writer.flush().map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok((name.to_string(), rows.len()))
    }

    pub fn write_manifest(&self, name: &str, manifest: &Manifest<'_>) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        fs::write(&path, manifest.render()).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

pub struct Manifest<'a> {
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub elapsed: Duration,
    pub files: &'a [(String, usize)],
}

impl Manifest<'_> {
    pub fn render(&self) -> String {
        let c = self.config;
        let mut s = String::new();
        let list = |v: &[usize]| {
            v.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "kicktop-cli = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "kicktop = {}", kicktop::VERSION);
        let _ = writeln!(s, "j = {}", c.j);
        let _ = writeln!(s, "state = {}", c.state);
        let _ = writeln!(s, "axis-a = {:?}", c.axis_a.components());
        let _ = writeln!(s, "axis-b = {:?}", c.axis_b.components());
        let _ = writeln!(
            s,
            "kappa = {}:{}:{} ({} points)",
            c.kappa.min,
            c.kappa.step,
            c.kappa.max,
            c.kappa.values().len()
        );
        let _ = writeln!(s, "n = {}", list(&c.n_values));
        let _ = writeln!(s, "T = {}", c.window);
        let _ = writeln!(s, "t-alpha-max = {}", c.t_alpha_max);
        match c.threads {
            Some(t) => {
                let _ = writeln!(s, "threads = {t}");
            }
            None => {
                let _ = writeln!(s, "threads = default");
            }
        }
        let _ = writeln!(s, "wall-time-s = {:.3}", self.elapsed.as_secs_f64());
        for (name, rows) in self.files {
            let _ = writeln!(s, "file = {name} ({rows} rows)");
        }
        s
    }
}
