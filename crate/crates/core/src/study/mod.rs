//! Experiments driven by a [`StudyConfig`], and the files they write.
//!
//! Each `*_command` function runs one experiment, writes its CSV tables and
//! `report.json` into an output directory, and returns the report so callers
//! can map failed checks to an exit status.

pub mod config;
pub mod consistency;
pub mod convergence;
pub mod lemma4;
pub mod output;

use std::fs;
use std::path::Path;

use serde_json::json;

use crate::dual::{corollary_residual, corollary_test_function, CorollaryData, TimeField};
use crate::error::Result;
use crate::grid::min_value;
use crate::integrator::Trajectory;
use crate::model::ModelParams;

pub use config::{ConfigError, InitialSpec, KernelSpec, StudyConfig};
pub use consistency::{run_consistency_test, ConsistencyRow, TestFunction};
pub use convergence::{
    local_self_convergence, run_convergence_study, run_local_reference, run_nonlocal, ConvergenceReport,
    ConvergenceRow, SelfConvergence,
};
pub use lemma4::{run_lemma4_audit, Lemma4Audit, LEMMA4_SPREAD_LIMIT};
pub use output::{Check, Report};

/// Relative mass drift tolerated when reactions vanish.
pub const MASS_TOL: f64 = 1e-9;
/// Lowest admissible density value.
pub const POSITIVITY_FLOOR: f64 = -1e-10;
/// Allowed entropy increase between consecutive records when reactions vanish.
pub const ENTROPY_STEP_TOL: f64 = 1e-8;
/// Slack in `E(T) + D(T) ≤ E(0)` when reactions vanish.
pub const ENTROPY_BUDGET_TOL: f64 = 1e-6;
/// Bound on e_n for spatially constant data.
pub const CONSTANT_DATUM_TOL: f64 = 1e-6;
/// The corollary residual may exceed the Picard tolerance by this factor.
pub const RESIDUAL_FACTOR: f64 = 10.0;

pub const SUBSEQUENCE_NOTE: &str = "Convergence is guaranteed only along a subsequence n_j; \
monotone decrease of e_n across the whole list is a numerical observation on smooth data, \
not a proven guarantee.";

/// Mass, positivity and entropy checks for one solver run.
pub fn trajectory_checks(traj: &Trajectory, params: &ModelParams) -> Vec<Check> {
    let diag = &traj.diagnostics;
    let mut checks = Vec::new();
    let min = diag.iter().flat_map(|r| r.min).fold(f64::INFINITY, f64::min);
    checks.push(Check::new("positivity", min >= POSITIVITY_FLOOR, format!("min density {min:e}")));
    if !params.reactions_vanish() {
        return checks;
    }
    let (first, last) = (diag.first().expect("initial record"), diag.last().expect("final record"));
    let drift = (0..2)
        .map(|s| {
            let m0 = first.mass[s];
            if m0 == 0.0 {
                last.mass[s].abs()
            } else {
                ((last.mass[s] - m0) / m0).abs()
            }
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("mass_conservation", drift <= MASS_TOL, format!("max relative drift {drift:e}")));
    let rise = diag.windows(2).map(|w| w[1].entropy - w[0].entropy).fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::new(
        "entropy_nonincreasing",
        rise <= ENTROPY_STEP_TOL,
        format!("largest increase between records {rise:e}"),
    ));
    let budget = last.entropy + last.dissipation - first.entropy;
    checks.push(Check::new("entropy_budget", budget <= ENTROPY_BUDGET_TOL, format!("E(T) + D(T) - E(0) = {budget:e}")));
    checks
}

fn run_summary(traj: &Trajectory) -> serde_json::Value {
    let last = traj.diagnostics.last();
    json!({
        "steps": traj.steps,
        "snapshots": traj.snapshots.len(),
        "final_entropy": last.map(|r| r.entropy),
        "final_dissipation": last.map(|r| r.dissipation),
        "final_mass": last.map(|r| r.mass),
    })
}

fn write_run(out: &Path, traj: &Trajectory) -> Result<()> {
    output::write_diagnostics_csv(&out.join("diagnostics.csv"), &traj.diagnostics)?;
    output::write_trajectory_snapshots(&out.join("snapshots"), traj)
}

pub fn simulate_nonlocal_command(cfg: &StudyConfig, out: &Path) -> Result<Report> {
    fs::create_dir_all(out)?;
    let traj = run_nonlocal(cfg, cfg.n)?;
    write_run(out, &traj)?;
    let mut report = Report::new("simulate-nonlocal");
    report.checks = trajectory_checks(&traj, &cfg.model);
    report.data = json!({ "n": cfg.n, "run": run_summary(&traj) });
    report.write(&out.join("report.json"))?;
    Ok(report)
}

pub fn simulate_local_command(cfg: &StudyConfig, out: &Path) -> Result<Report> {
    fs::create_dir_all(out)?;
    let traj = run_local_reference(cfg)?;
    write_run(out, &traj)?;
    let mut report = Report::new("simulate-local");
    report.checks = trajectory_checks(&traj, &cfg.model);
    report.data = json!({ "run": run_summary(&traj) });
    report.write(&out.join("report.json"))?;
    Ok(report)
}

/// Solves the dual problem behind the transformed test function `φ_in` for
/// a nonlocal trajectory at scale `cfg.n`.
pub fn dual_solve_command(cfg: &StudyConfig, out: &Path) -> Result<Report> {
    fs::create_dir_all(out)?;
    let op = convergence::nonlocal_operator(cfg, cfg.n)?;
    let traj = run_nonlocal(cfg, cfg.n)?;
    let data = CorollaryData {
        trajectory: &traj,
        species: cfg.dual.species,
        lambda: cfg.dual.lambda,
        psi: TimeField::Steady(cfg.dual.psi(op.grid())),
        operator: &op,
        params: &cfg.model,
    };
    let picard = cfg.dual.picard();
    let sol = corollary_test_function(&data, &picard)?;
    let residual = corollary_residual(&data, &sol)?;

    output::write_iterations_csv(&out.join("iterations.csv"), &sol.dual.iterations)?;
    let count = cfg.snapshots.min(sol.times.len());
    let picks: Vec<usize> = (0..count)
        .map(|j| ((j as f64) * (sol.times.len() - 1) as f64 / (count - 1).max(1) as f64).round() as usize)
        .collect();
    output::write_field_series(
        &out.join("phi"),
        "phi",
        &picks.iter().map(|&k| sol.times[k]).collect::<Vec<_>>(),
        &picks.iter().map(|&k| sol.phi_in[k].clone()).collect::<Vec<_>>(),
    )?;

    let min = sol.phi_in.iter().map(min_value).fold(f64::INFINITY, f64::min);
    let terminal = sol.phi_in.last().map_or(f64::NAN, |f| f.max_abs());
    let theta = sol.dual.max_contraction();
    let bound = sol.dual.schedule.contraction_bound;
    let mut report = Report::new("dual-solve");
    report.checks = vec![
        Check::new("phi_nonnegative", min >= POSITIVITY_FLOOR, format!("min phi_in {min:e}")),
        Check::new("terminal_value", terminal == 0.0, format!("max |phi_in(T)| {terminal:e}")),
        Check::new(
            "contraction",
            theta < 1.0 && theta <= bound * (1.0 + 1e-9),
            format!("observed {theta:e}, bound {bound:e}"),
        ),
        Check::new(
            "residual",
            residual <= RESIDUAL_FACTOR * picard.tol,
            format!("discrete L2 residual {residual:e}, tolerance {:e}", picard.tol),
        ),
    ];
    report.data = json!({
        "n": cfg.n,
        "species": cfg.dual.species.number(),
        "lambda": cfg.dual.lambda,
        "slab_length": sol.dual.schedule.slab_length,
        "slab_count": sol.dual.schedule.slab_count,
        "contraction_bound": bound,
        "max_observed_contraction": theta,
        "iterations": sol.dual.iterations.len(),
        "residual": residual,
    });
    report.write(&out.join("report.json"))?;
    Ok(report)
}

pub fn consistency_command(cfg: &StudyConfig, out: &Path) -> Result<Report> {
    fs::create_dir_all(out)?;
    let grid = cfg.build_grid()?;
    let rows = run_consistency_test(&cfg.kernel, &grid, &cfg.n_list, cfg.consistency_function)?;
    output::write_consistency_csv(&out.join("consistency.csv"), &rows)?;
    let mut report = Report::new("consistency-test");
    let finite = rows.iter().all(|r| r.max_err.is_finite());
    report.checks.push(Check::new("errors_finite", finite, ""));
    if cfg.consistency_function == TestFunction::Constant {
        let max = rows.iter().map(|r| r.max_err).fold(0.0, f64::max);
        report.checks.push(Check::new("constant_exact", max == 0.0, format!("max error {max:e}")));
    }
    report.data = json!({ "function": cfg.consistency_function.to_string(), "rows": rows });
    report.write(&out.join("report.json"))?;
    Ok(report)
}

pub fn lemma4_command(cfg: &StudyConfig, out: &Path) -> Result<Report> {
    fs::create_dir_all(out)?;
    let grid = cfg.build_grid()?;
    let audit = run_lemma4_audit(&cfg.kernel, &grid, &cfg.n_list, cfg.lemma4_p)?;
    output::write_lemma4_csv(&out.join("lemma4.csv"), &audit.rows)?;
    let mut report = Report::new("lemma4-audit");
    report.checks = vec![
        Check::new("ratios_finite", audit.all_finite(), ""),
        Check::new(
            "ratios_bounded",
            audit.bounded(),
            format!("max/min = {:e}, limit {LEMMA4_SPREAD_LIMIT}", audit.spread),
        ),
    ];
    report.data = serde_json::to_value(&audit)?;
    report.write(&out.join("report.json"))?;
    Ok(report)
}

pub fn convergence_command(cfg: &StudyConfig, out: &Path) -> Result<Report> {
    fs::create_dir_all(out)?;
    let study = run_convergence_study(cfg)?;
    output::write_convergence_csv(&out.join("convergence.csv"), &study.rows)?;
    let mut report = Report::new("convergence-study");
    report.checks.push(Check::new("errors_finite", study.all_finite(), ""));
    report.checks.push(Check::new(
        "monotone_decrease",
        study.strictly_decreasing(),
        "e_n strictly decreasing across n_list (observational)",
    ));
    if cfg.initial.is_constant() {
        let max = study.max_error();
        report.checks.push(Check::new("constant_datum", max <= CONSTANT_DATUM_TOL, format!("max e_n {max:e}")));
    }
    report.notes.push(SUBSEQUENCE_NOTE.to_string());
    report.data = serde_json::to_value(&study)?;
    report.write(&out.join("report.json"))?;
    Ok(report)
}
