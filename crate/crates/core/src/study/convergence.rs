//! Nonlocal-to-local convergence as the kernel scale `n` grows.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{lq_norm_spacetime, Field, Grid, Species, SpeciesPair};
use crate::integrator::Trajectory;
use crate::kernel::{compute_c1, discretize, KernelKind};
use crate::local_solver::{run_local, LocalRunConfig};
use crate::nonlocal_op::NonlocalOperator;
use crate::nonlocal_solver::{run, NonlocalRunConfig};
use crate::numerics::rate_log2;

use super::config::StudyConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    /// `‖u_{n,i} − v_i‖_{L^q(Q_T)}` per species.
    pub e: [f64; 2],
    pub e_total: f64,
    /// `log₂(e_prev / e_n)` when `n` doubled from the previous row.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceInfo {
    pub cells: usize,
    pub h: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub q: f64,
    pub t_final: f64,
    pub snapshot_count: usize,
    pub rows: Vec<ConvergenceRow>,
    pub reference: ReferenceInfo,
}

impl ConvergenceReport {
    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| r.e_total.is_finite())
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].e_total < w[0].e_total)
    }

    /// `e_last ≤ e_first · factor`.
    pub fn reduced_by(&self, factor: f64) -> bool {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => b.e_total <= factor * a.e_total,
            _ => false,
        }
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.e_total).fold(0.0, f64::max)
    }
}

/// `Δⁿ` with the rescaled kernel `J_n` described by the configuration.
pub fn nonlocal_operator(cfg: &StudyConfig, n: u32) -> Result<NonlocalOperator> {
    let grid = cfg.build_grid()?;
    let profile = cfg.kernel.profile(grid.dim())?;
    let c1 = compute_c1(&profile, cfg.kernel.quad_resolution);
    let k = discretize(&profile, &c1, n, &grid, cfg.kernel.min_cells_per_radius, KernelKind::Rescaled)?;
    NonlocalOperator::new(k, grid)
}

pub fn run_nonlocal(cfg: &StudyConfig, n: u32) -> Result<Trajectory> {
    let op = nonlocal_operator(cfg, n)?;
    let initial = cfg.initial.sample(op.grid())?;
    let run_cfg = NonlocalRunConfig::new(op, cfg.model, initial, cfg.solver, cfg.snapshot_times())?;
    run(&run_cfg)
}

pub fn run_local_reference(cfg: &StudyConfig) -> Result<Trajectory> {
    let grid = cfg.build_grid()?;
    let initial = cfg.initial.sample(&grid)?;
    let run_cfg = LocalRunConfig::new(grid, cfg.model, initial, cfg.solver, cfg.snapshot_times())?;
    run_local(&run_cfg)
}

/// `‖u_i − v_i‖_{L^q(Q_T)}` from snapshots taken at identical times.
pub fn spacetime_error(a: &Trajectory, b: &Trajectory, s: Species, q: f64) -> Result<f64> {
    if a.snapshots.len() != b.snapshots.len() {
        return Err(Error::InvalidArgument("trajectories hold different snapshot counts".into()));
    }
    let diff = a
        .snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|((ta, ua), (tb, ub))| {
            if (ta - tb).abs() > 1e-12 * ta.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!("snapshot times differ: {ta} vs {tb}")));
            }
            Ok((*ta, ua.get(s).axpy(-1.0, ub.get(s))?))
        })
        .collect::<Result<Vec<(f64, Field)>>>()?;
    lq_norm_spacetime(&diff, q)
}

/// Runs the local reference once, then every `n` in parallel, and measures
/// `e_n` on the shared snapshot schedule.
pub fn run_convergence_study(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    cfg.model.validate_for_convergence()?;
    let grid = cfg.build_grid()?;
    let reference = run_local_reference(cfg)?;
    let runs: Vec<Result<Trajectory>> = cfg
        .n_list
        .par_iter()
        .map(|&n| run_nonlocal(cfg, n).map_err(|e| Error::StudyRun { n, source: Box::new(e) }))
        .collect();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(runs.len());
    for (&n, traj) in cfg.n_list.iter().zip(runs) {
        let traj = traj?;
        let e = [
            spacetime_error(&traj, &reference, Species::U1, cfg.q)?,
            spacetime_error(&traj, &reference, Species::U2, cfg.q)?,
        ];
        let e_total = e[0] + e[1];
        let rate = rows.last().filter(|prev| prev.n * 2 == n).map(|prev| rate_log2(prev.e_total, e_total));
        rows.push(ConvergenceRow { n, e, e_total, rate });
    }
    Ok(ConvergenceReport {
        q: cfg.q,
        t_final: cfg.model.t_final,
        snapshot_count: cfg.snapshots,
        rows,
        reference: ReferenceInfo { cells: grid.len(), h: grid.h(), steps: reference.steps },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfConvergence {
    /// Cells along x for each level, coarsest first.
    pub cells: Vec<usize>,
    /// `‖R v_{2h→h} − v_h‖_{L²(Ω)}` at `T` between consecutive levels.
    pub differences: Vec<f64>,
    pub orders: Vec<f64>,
}

/// Richardson self-convergence of the local solver: the configured grid is
/// refined `levels − 1` times and fine solutions are cell-averaged back.
pub fn local_self_convergence(cfg: &StudyConfig, levels: usize) -> Result<SelfConvergence> {
    if levels < 3 {
        return Err(Error::InvalidArgument("self-convergence needs at least three levels".into()));
    }
    let base = cfg.build_grid()?;
    let grids: Vec<Grid> = (0..levels)
        .map(|l| {
            let f = 1usize << l;
            Grid::new(base.dim(), base.extent(), [base.nx() * f, if base.dim() == 2 { base.ny() * f } else { 1 }])
        })
        .collect::<Result<_>>()?;
    let finals: Vec<SpeciesPair> = grids
        .par_iter()
        .map(|g| {
            let init = cfg.initial.sample(g)?;
            let times = vec![cfg.model.t_final];
            let traj = run_local(&LocalRunConfig::new(*g, cfg.model, init, cfg.solver, times)?)?;
            Ok(traj.snapshots.into_iter().last().expect("final snapshot").1)
        })
        .collect::<Result<_>>()?;
    let mut differences = Vec::with_capacity(levels - 1);
    for w in finals.windows(2) {
        let mut total = 0.0;
        for s in Species::BOTH {
            let fine = w[1].get(s).coarsen_by_two()?;
            let d = fine.axpy(-1.0, w[0].get(s))?;
            total += crate::grid::lq_norm_space(&d, 2.0)?;
        }
        differences.push(total);
    }
    let orders = differences.windows(2).map(|d| rate_log2(d[0], d[1])).collect();
    Ok(SelfConvergence { cells: grids.iter().map(Grid::nx).collect(), differences, orders })
}
