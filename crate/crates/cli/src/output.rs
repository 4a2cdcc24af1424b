//! CSV tables and the run summary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crdisc_core::deformation::SweepReport;
use crdisc_core::sector::ConvergenceTable;
use serde::Serialize;

use crate::error::CliError;

/// Exact header of the convergence table.
pub const CONVERGENCE_HEADER: [&str; 5] = ["nu", "f_gap", "c1gamma_gap", "radial_gap", "converged"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub pass: bool,
    pub metrics: BTreeMap<String, f64>,
    pub artifact_paths: Vec<String>,
}

/// Shortest round-trip decimal form, so equal runs write identical bytes.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Collects artifacts written under one output directory.
pub struct Artifacts {
    dir: PathBuf,
    paths: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Artifacts { dir: dir.to_path_buf(), paths: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn paths(&self) -> &[String] {
        &self.paths
    }

    fn register(&mut self, file: &str) -> PathBuf {
        let path = self.dir.join(file);
        self.paths.push(path.to_string_lossy().into_owned());
        path
    }

    pub fn write_csv(&mut self, file: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
        let path = self.register(file);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_text(&mut self, file: &str, text: &str) -> Result<(), CliError> {
        let path = self.register(file);
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn write_convergence(&mut self, file: &str, table: &ConvergenceTable) -> Result<(), CliError> {
        let rows: Vec<Vec<String>> = table
            .rows
            .iter()
            .map(|r| vec![num(r.nu), num(r.f_gap), num(r.c1gamma_gap), num(r.radial_gap), r.converged.to_string()])
            .collect();
        self.write_csv(file, &CONVERGENCE_HEADER.map(String::from), &rows)
    }

    pub fn write_sweep(&mut self, file: &str, rep: &SweepReport) -> Result<(), CliError> {
        let Some(first) = rep.points.first() else {
            return self.write_csv(file, &[], &[]);
        };
        let (d, m) = (first.x0.len(), first.w0.len());
        let rows: Vec<Vec<String>> = rep
            .points
            .iter()
            .map(|p| {
                let mut r: Vec<String> = p.x0.iter().map(|&x| num(x)).collect();
                r.extend(p.w0.iter().map(|w| num(w.re)));
                r.extend(p.w0.iter().map(|w| num(w.im)));
                r.push(num(p.r));
                r.extend(p.z.iter().map(|z| num(z.re)));
                r.extend(p.z.iter().map(|z| num(z.im)));
                r.extend(p.w.iter().map(|w| num(w.re)));
                r.extend(p.w.iter().map(|w| num(w.im)));
                r
            })
            .collect();
        self.write_csv(file, &sweep_header(d, m), &rows)
    }

    /// Writes `summary.json` (not listed among the artifacts it describes).
    pub fn write_summary(&self, result: &ExperimentResult) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(result).map_err(|e| CliError::Io(e.to_string()))?;
        let path = self.dir.join("summary.json");
        fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// `x0_1..x0_d, w0_re, w0_im, r, z_re_1..d, z_im_1..d, w_re, w_im`; the `w`
/// columns carry an index suffix when `n - d > 1`.
pub fn sweep_header(d: usize, m: usize) -> Vec<String> {
    let expand = |name: &str, count: usize, always: bool| -> Vec<String> {
        if count == 1 && !always {
            vec![name.to_string()]
        } else {
            (1..=count).map(|i| format!("{name}_{i}")).collect()
        }
    };
    let mut h = expand("x0", d, true);
    h.extend(expand("w0_re", m, false));
    h.extend(expand("w0_im", m, false));
    h.push("r".into());
    h.extend(expand("z_re", d, true));
    h.extend(expand("z_im", d, true));
    h.extend(expand("w_re", m, false));
    h.extend(expand("w_im", m, false));
    h
}
