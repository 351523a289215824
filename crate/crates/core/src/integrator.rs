//! Forward-Euler time loop shared by the nonlocal and the local SKT solvers.

use crate::error::{Error, Result};
use crate::grid::{min_value, total_mass, Field, Grid, Species, SpeciesPair};
use crate::model::{entropy, ModelParams};

const DT_FLOOR_EPS: f64 = 1e-12;

/// Step-size and safeguard knobs common to both solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Fraction of the explicit stability limit actually used, in `(0, 1]`.
    pub dt_safety: f64,
    /// Cells may dip this far below zero before a step is rejected.
    pub positivity_tol: f64,
    /// Diagnostics are recorded every `diag_stride` steps (and at the end).
    pub diag_stride: usize,
    /// Optional hard cap on the step size.
    pub dt_max: Option<f64>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { dt_safety: 0.4, positivity_tol: 1e-10, diag_stride: 10, dt_max: None }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(Error::InvalidArgument(format!("dt_safety must lie in (0, 1], got {}", self.dt_safety)));
        }
        if !(self.positivity_tol >= 0.0) {
            return Err(Error::InvalidArgument("positivity_tol must be nonnegative".into()));
        }
        if self.diag_stride == 0 {
            return Err(Error::InvalidArgument("diag_stride must be at least 1".into()));
        }
        if let Some(m) = self.dt_max {
            if !(m > 0.0) {
                return Err(Error::InvalidArgument(format!("dt_max must be positive, got {m}")));
            }
        }
        Ok(())
    }
}

/// One row of the diagnostics table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// Entropy `E(t)`.
    pub entropy: f64,
    /// Accumulated dissipation `D(t)`.
    pub dissipation: f64,
    pub mass: [f64; 2],
    pub min: [f64; 2],
    /// Step size that produced this state (0 for the initial record).
    pub dt: f64,
}

/// Stored snapshots and the diagnostics series of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, SpeciesPair)>,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_time(&self) -> Option<f64> {
        self.snapshots.last().map(|(t, _)| *t)
    }

    /// State at `t` by piecewise-linear interpolation between snapshots.
    pub fn state_at(&self, t: f64) -> Result<SpeciesPair> {
        let snaps = &self.snapshots;
        let first = snaps.first().ok_or_else(|| Error::InvalidArgument("trajectory has no snapshots".into()))?;
        let last = snaps.last().expect("non-empty");
        let slack = 1e-12 * last.0.abs().max(1.0);
        if t < first.0 - slack || t > last.0 + slack {
            return Err(Error::InvalidArgument(format!("time {t} outside stored range [{}, {}]", first.0, last.0)));
        }
        let k = snaps.partition_point(|(s, _)| *s <= t);
        if k == 0 {
            return Ok(first.1.clone());
        }
        if k == snaps.len() {
            return Ok(last.1.clone());
        }
        let (t0, u0) = &snaps[k - 1];
        let (t1, u1) = &snaps[k];
        u0.lerp(u1, (t - t0) / (t1 - t0))
    }

    /// `(t, u_i(t))` for every snapshot.
    pub fn species_series(&self, s: Species) -> Vec<(f64, Field)> {
        self.snapshots.iter().map(|(t, u)| (*t, u.get(s).clone())).collect()
    }
}

/// Spatial discretisation plugged into the time loop.
pub(crate) trait Scheme {
    fn grid(&self) -> &Grid;
    fn params(&self) -> &ModelParams;
    fn settings(&self) -> &SolverSettings;
    /// Writes the discrete diffusion operator applied to `p` into `out`.
    fn diffuse(&self, p: &[f64], out: &mut [f64]);
    /// Largest stable step of the diffusion part for Lipschitz bound `l_p`.
    fn diffusive_dt(&self, l_p: f64) -> f64;
    /// Dissipation integrand `∬J(Δu)²` or `∫|∇u|²` of one species.
    fn dissipation(&self, u: &[f64]) -> f64;
}

pub(crate) fn stable_dt<S: Scheme + ?Sized>(scheme: &S, u: &SpeciesPair) -> f64 {
    let p = scheme.params();
    let settings = scheme.settings();
    let sup = [u.u1().max_abs(), u.u2().max_abs()];
    let l_p = Species::BOTH
        .iter()
        .map(|&s| p.dp_dui_at(s, sup[s.index()], sup[s.other().index()]))
        .fold(0.0_f64, f64::max)
        .max(DT_FLOOR_EPS);
    let mut dt = scheme.diffusive_dt(l_p);
    let beta_max = p.beta.iter().flatten().copied().fold(0.0_f64, f64::max);
    let u_sup = sup[0].max(sup[1]);
    let reaction = p.alpha.iter().map(|&a| a + 2.0 * beta_max * u_sup).fold(0.0_f64, f64::max);
    dt = dt.min(settings.dt_safety / (reaction + DT_FLOOR_EPS));
    if let Some(m) = settings.dt_max {
        dt = dt.min(m);
    }
    dt
}

/// One explicit Euler step `u_i ← u_i + dt (D p_i(u) + f_i(u))`; `t_new` is
/// only used to label errors.
pub(crate) fn step<S: Scheme + ?Sized>(scheme: &S, u: &SpeciesPair, dt: f64, t_new: f64) -> Result<SpeciesPair> {
    let params = scheme.params();
    let grid = *scheme.grid();
    if *u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let (v1, v2) = (u.u1().values(), u.u2().values());
    let len = grid.len();
    let mut p = vec![0.0; len];
    let mut lap = vec![0.0; len];
    let mut next = [Vec::with_capacity(len), Vec::with_capacity(len)];
    for s in Species::BOTH {
        let (ui, uj) = match s {
            Species::U1 => (v1, v2),
            Species::U2 => (v2, v1),
        };
        for ((pc, &a), &b) in p.iter_mut().zip(ui).zip(uj) {
            *pc = params.p_at(s, a, b);
        }
        scheme.diffuse(&p, &mut lap);
        let out = &mut next[s.index()];
        for k in 0..len {
            let rhs = lap[k] + params.f_at(s, [v1[k], v2[k]]);
            out.push(ui[k] + dt * rhs);
        }
    }
    let [n1, n2] = next;
    let new = SpeciesPair::new(Field::from_values(grid, n1)?, Field::from_values(grid, n2)?)?;
    if !new.is_finite() {
        return Err(Error::NonFinite { t: t_new });
    }
    let tol = scheme.settings().positivity_tol;
    for s in Species::BOTH {
        let m = min_value(new.get(s));
        if m < -tol {
            return Err(Error::PositivityBreach { t: t_new, species: s.number(), min: m });
        }
    }
    Ok(new)
}

fn clamped_entropy(u: &SpeciesPair) -> Result<f64> {
    let clamp = |f: &Field| f.map(|v| v.max(0.0));
    entropy(&SpeciesPair::new(clamp(u.u1()), clamp(u.u2()))?)
}

fn record(t: f64, u: &SpeciesPair, dissipation: f64, dt: f64) -> Result<DiagnosticsRecord> {
    Ok(DiagnosticsRecord {
        t,
        entropy: clamped_entropy(u)?,
        dissipation,
        mass: [total_mass(u.u1()), total_mass(u.u2())],
        min: [min_value(u.u1()), min_value(u.u2())],
        dt,
    })
}

pub(crate) fn validate_initial(initial: &SpeciesPair, grid: &Grid) -> Result<()> {
    if initial.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if !initial.is_finite() {
        return Err(Error::InvalidArgument("initial data must be finite".into()));
    }
    for s in Species::BOTH {
        if let Some((cell, &value)) = initial.get(s).values().iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeInput { cell, value });
        }
    }
    Ok(())
}

pub(crate) fn validate_snapshot_times(times: &[f64], t_final: f64) -> Result<()> {
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("snapshot times must be strictly increasing".into()));
    }
    if times.iter().any(|&t| !(0.0..=t_final).contains(&t)) {
        return Err(Error::InvalidArgument(format!("snapshot times must lie in [0, {t_final}]")));
    }
    Ok(())
}

/// Integrates from `t = 0` to `T`, landing exactly on every snapshot time.
pub(crate) fn run<S: Scheme + ?Sized>(scheme: &S, initial: &SpeciesPair, snapshot_times: &[f64]) -> Result<Trajectory> {
    let params = *scheme.params();
    let settings = *scheme.settings();
    let t_final = params.t_final;
    let snap_tol = 1e-12 * t_final.max(1.0);

    let mut u = initial.clone();
    let mut t = 0.0;
    let mut accumulated = 0.0;
    let mut steps = 0usize;
    let mut diagnostics = vec![record(0.0, &u, 0.0, 0.0)?];
    let mut snapshots = Vec::with_capacity(snapshot_times.len());
    let mut next_snap = 0;
    while next_snap < snapshot_times.len() && snapshot_times[next_snap] <= snap_tol {
        snapshots.push((snapshot_times[next_snap], u.clone()));
        next_snap += 1;
    }

    while t < t_final - snap_tol {
        let target = snapshot_times.get(next_snap).copied().unwrap_or(t_final).min(t_final);
        let dt = stable_dt(scheme, &u).min(target - t);
        // left-endpoint rule for D(t)
        let rate: f64 = Species::BOTH
            .iter()
            .filter(|s| params.a[s.index()] > 0.0)
            .map(|&s| params.a[s.index()] * scheme.dissipation(u.get(s).values()))
            .sum();
        accumulated += dt * rate;

        let mut t_new = t + dt;
        if (target - t_new).abs() <= snap_tol {
            t_new = target;
        }
        u = step(scheme, &u, dt, t_new)?;
        t = t_new;
        steps += 1;

        let finished = t >= t_final - snap_tol;
        if steps.is_multiple_of(settings.diag_stride) || finished {
            diagnostics.push(record(t, &u, accumulated, dt)?);
        }
        while next_snap < snapshot_times.len() && snapshot_times[next_snap] <= t + snap_tol {
            snapshots.push((snapshot_times[next_snap], u.clone()));
            next_snap += 1;
        }
    }
    Ok(Trajectory { snapshots, diagnostics, steps })
}

/// `count` equally spaced times covering `[0, t_final]`.
pub fn uniform_times(t_final: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![t_final],
        _ => (0..count).map(|k| t_final * k as f64 / (count - 1) as f64).collect(),
    }
}
