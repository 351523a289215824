//! CSV tables, snapshot directories and `report.json`.
//!
//! Floats are written in shortest round-trip scientific form so that identical
//! runs give byte-identical files.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::dual::IterationRecord;
use crate::error::Result;
use crate::grid::{write_snapshot, Field};
use crate::integrator::{DiagnosticsRecord, Trajectory};

use super::consistency::ConsistencyRow;
use super::convergence::ConvergenceRow;
use super::lemma4::Lemma4Row;

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    write_table(
        path,
        &["n", "e1", "e2", "e_total", "rate"],
        rows.iter().map(|r| vec![r.n.to_string(), num(r.e[0]), num(r.e[1]), num(r.e_total), opt(r.rate)]),
    )
}

pub fn write_consistency_csv(path: &Path, rows: &[ConsistencyRow]) -> Result<()> {
    write_table(
        path,
        &["n", "max_err", "rate"],
        rows.iter().map(|r| vec![r.n.to_string(), num(r.max_err), opt(r.rate)]),
    )
}

pub fn write_lemma4_csv(path: &Path, rows: &[Lemma4Row]) -> Result<()> {
    write_table(path, &["n", "ratio"], rows.iter().map(|r| vec![r.n.to_string(), num(r.ratio)]))
}

pub fn write_diagnostics_csv(path: &Path, rows: &[DiagnosticsRecord]) -> Result<()> {
    write_table(
        path,
        &["t", "E", "D", "mass1", "mass2", "min1", "min2", "dt"],
        rows.iter().map(|r| {
            vec![
                num(r.t),
                num(r.entropy),
                num(r.dissipation),
                num(r.mass[0]),
                num(r.mass[1]),
                num(r.min[0]),
                num(r.min[1]),
                num(r.dt),
            ]
        }),
    )
}

pub fn write_iterations_csv(path: &Path, rows: &[IterationRecord]) -> Result<()> {
    write_table(
        path,
        &["slab", "iteration", "increment", "contraction_estimate"],
        rows.iter()
            .map(|r| vec![r.slab.to_string(), r.iteration.to_string(), num(r.increment), opt(r.contraction_estimate)]),
    )
}

/// Writes `u1_0000.txt`, `u2_0000.txt`, … into `dir`.
pub fn write_trajectory_snapshots(dir: &Path, traj: &Trajectory) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (k, (t, u)) in traj.snapshots.iter().enumerate() {
        write_snapshot(&dir.join(format!("u1_{k:04}.txt")), *t, u.u1())?;
        write_snapshot(&dir.join(format!("u2_{k:04}.txt")), *t, u.u2())?;
    }
    Ok(())
}

/// Writes `phi_0000.txt`, … into `dir`.
pub fn write_field_series(dir: &Path, stem: &str, times: &[f64], fields: &[Field]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (k, (t, f)) in times.iter().zip(fields).enumerate() {
        write_snapshot(&dir.join(format!("{stem}_{k:04}.txt")), *t, f)?;
    }
    Ok(())
}

/// One named pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub data: serde_json::Value,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), checks: Vec::new(), notes: Vec::new(), data: serde_json::Value::Null }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}
