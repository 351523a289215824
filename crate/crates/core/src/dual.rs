//! Picard solver for the linear nonlocal dual problem
//!
//! ```text
//! ∂_t φ − a(t,x) Δ^{1,ρ} φ = b(t,x),   φ(0) = c,
//! Δ^{1,ρ}φ(x) = ∫_Ω ρ(x−y)(φ(y) − φ(x)) dy,
//! ```
//!
//! by iterating `𝒯(w)(t) = c + ∫₀ᵗ (a Δ^{1,ρ} w + b) ds` on short time slabs.
//! On a slab of length `t₀` the map is Lipschitz with constant
//! `2 t₀ ‖a‖_∞ ‖ρ‖_mass`, where `‖ρ‖_mass` is the total discrete kernel weight,
//! so choosing `t₀` below `1/(2‖a‖_∞‖ρ‖_mass)` makes it a strict contraction.
//! The end state of each slab seeds the next one.
//!
//! [`corollary_test_function`] builds the backward problem used in duality
//! estimates: with `a = p̃_i(u(T−t))`, `b = −e^{λt} ψ(T−t) √p̃_i(u(T−t))` and
//! `c = 0`, the function `φ_in(t) = e^{−λ(T−t)} φ(T−t)` solves
//! `∂_t φ_in + p̃_i Δⁿ φ_in − λ φ_in = √p̃_i ψ` with `φ_in(T) = 0`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Species};
use crate::integrator::Trajectory;
use crate::kernel::DiscreteKernel;
use crate::model::ModelParams;
use crate::nonlocal_op::NonlocalOperator;
use crate::numerics::CompensatedSum;

/// A field that depends on time.
#[derive(Clone)]
pub enum TimeField {
    Steady(Field),
    /// Piecewise-linear interpolation between samples at increasing times.
    Sampled {
        times: Vec<f64>,
        fields: Vec<Field>,
    },
    Function(Arc<dyn Fn(f64) -> Field + Send + Sync>),
}

impl fmt::Debug for TimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Steady(_) => f.write_str("TimeField::Steady"),
            Self::Sampled { times, .. } => write!(f, "TimeField::Sampled({} samples)", times.len()),
            Self::Function(_) => f.write_str("TimeField::Function"),
        }
    }
}

/// Number of probes used to bound a [`TimeField::Function`] in sup-norm.
const SUP_PROBES: usize = 1025;

impl TimeField {
    pub fn sampled(times: Vec<f64>, fields: Vec<Field>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::InvalidArgument("sampled field needs one field per time".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("sample times must be strictly increasing".into()));
        }
        Ok(Self::Sampled { times, fields })
    }

    pub fn function(f: impl Fn(f64) -> Field + Send + Sync + 'static) -> Self {
        Self::Function(Arc::new(f))
    }

    pub fn at(&self, t: f64) -> Field {
        match self {
            Self::Steady(f) => f.clone(),
            Self::Function(f) => f(t),
            Self::Sampled { times, fields } => {
                let k = times.partition_point(|&s| s <= t);
                if k == 0 {
                    return fields[0].clone();
                }
                if k == times.len() {
                    return fields[k - 1].clone();
                }
                let theta = (t - times[k - 1]) / (times[k] - times[k - 1]);
                fields[k - 1].zip_map(&fields[k], |a, b| a + theta * (b - a)).expect("samples share a grid")
            }
        }
    }

    /// `sup |·|` over `[0, t_final]`; exact for steady and sampled data,
    /// estimated on a uniform probe grid for functions.
    pub fn sup_norm(&self, t_final: f64) -> f64 {
        match self {
            Self::Steady(f) => f.max_abs(),
            Self::Sampled { fields, .. } => fields.iter().map(Field::max_abs).fold(0.0, f64::max),
            Self::Function(f) => {
                (0..SUP_PROBES).map(|k| f(t_final * k as f64 / (SUP_PROBES - 1) as f64).max_abs()).fold(0.0, f64::max)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct DualProblem {
    operator: NonlocalOperator,
    a: TimeField,
    b: TimeField,
    c: Field,
    t_final: f64,
}

impl DualProblem {
    pub fn new(rho: DiscreteKernel, grid: Grid, a: TimeField, b: TimeField, c: Field, t_final: f64) -> Result<Self> {
        if *c.grid() != grid {
            return Err(Error::GridMismatch);
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_final must be positive, got {t_final}")));
        }
        if !c.is_finite() {
            return Err(Error::InvalidArgument("initial datum must be bounded".into()));
        }
        let operator = NonlocalOperator::new(rho, grid)?;
        Ok(Self { operator, a, b, c, t_final })
    }

    pub fn operator(&self) -> &NonlocalOperator {
        &self.operator
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardSettings {
    /// Stop once the sup-norm increment falls to this level.
    pub tol: f64,
    pub max_iters: usize,
    /// Fraction of the contraction limit used as slab length.
    pub slab_safety: f64,
    /// Trapezoid sub-intervals per slab.
    pub subintervals: usize,
}

impl Default for PicardSettings {
    fn default() -> Self {
        Self { tol: 1e-12, max_iters: 200, slab_safety: 0.5, subintervals: 32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabSchedule {
    pub slab_length: f64,
    pub slab_count: usize,
    /// Proven Lipschitz constant `2 t₀ ‖a‖_∞ ‖ρ‖_mass` of 𝒯 on one slab.
    pub contraction_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub slab: usize,
    pub iteration: usize,
    pub increment: f64,
    /// Ratio of this increment to the previous one (`None` on the first sweep).
    pub contraction_estimate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct DualSolution {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    pub iterations: Vec<IterationRecord>,
    pub schedule: SlabSchedule,
}

impl DualSolution {
    /// Largest observed increment ratio over all slabs.
    pub fn max_contraction(&self) -> f64 {
        self.iterations.iter().filter_map(|r| r.contraction_estimate).fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.fields.iter().map(crate::grid::min_value).fold(f64::INFINITY, f64::min)
    }

    pub fn final_field(&self) -> &Field {
        self.fields.last().expect("solution holds the initial datum")
    }
}

pub fn slab_schedule(problem: &DualProblem, settings: &PicardSettings) -> SlabSchedule {
    let a_sup = problem.a.sup_norm(problem.t_final);
    let mass = problem.operator.kernel().total_weight();
    let lip = 2.0 * a_sup * mass;
    let count = if lip > 0.0 {
        let limit = settings.slab_safety / lip;
        (problem.t_final / limit).ceil().max(1.0) as usize
    } else {
        1
    };
    let slab_length = problem.t_final / count as f64;
    SlabSchedule { slab_length, slab_count: count, contraction_bound: lip * slab_length }
}

/// Solves the dual problem on `[0, T]`, returning φ at every trapezoid node.
/// Each slab starts from the constant extension of its initial datum.
pub fn solve_dual(problem: &DualProblem, settings: &PicardSettings) -> Result<DualSolution> {
    solve(problem, settings, None)
}

/// As [`solve_dual`], but every slab starts iterating from `guess`.
pub fn solve_dual_from(problem: &DualProblem, settings: &PicardSettings, guess: &TimeField) -> Result<DualSolution> {
    solve(problem, settings, Some(guess))
}

fn solve(problem: &DualProblem, settings: &PicardSettings, guess: Option<&TimeField>) -> Result<DualSolution> {
    if !(settings.tol > 0.0) {
        return Err(Error::InvalidArgument("picard tolerance must be positive".into()));
    }
    if settings.subintervals == 0 || settings.max_iters == 0 {
        return Err(Error::InvalidArgument("subintervals and max_iters must be positive".into()));
    }
    if let Some(g) = guess {
        if g.at(0.0).grid() != problem.operator.grid() {
            return Err(Error::GridMismatch);
        }
    }
    let schedule = slab_schedule(problem, settings);
    if schedule.contraction_bound >= 1.0 {
        return Err(Error::NoContraction { slab: 0, ratio: schedule.contraction_bound });
    }
    let m = settings.subintervals;
    let len = problem.operator.grid().len();
    let grid = *problem.operator.grid();

    let mut times = vec![0.0];
    let mut fields = vec![problem.c.clone()];
    let mut iterations = Vec::new();
    let mut start = problem.c.values().to_vec();

    for slab in 0..schedule.slab_count {
        let s0 = problem.t_final * slab as f64 / schedule.slab_count as f64;
        let s1 = problem.t_final * (slab + 1) as f64 / schedule.slab_count as f64;
        let node_t: Vec<f64> =
            (0..=m).map(|k| if k == m { s1 } else { s0 + (s1 - s0) * k as f64 / m as f64 }).collect();
        let a_nodes: Vec<Field> = node_t.iter().map(|&t| problem.a.at(t)).collect();
        let b_nodes: Vec<Field> = node_t.iter().map(|&t| problem.b.at(t)).collect();
        let mut w: Vec<Vec<f64>> = match guess {
            Some(g) => node_t.iter().map(|&t| g.at(t).into_values()).collect(),
            None => vec![start.clone(); m + 1],
        };
        let mut rhs = vec![vec![0.0; len]; m + 1];
        let mut lap = vec![0.0; len];
        let mut prev_inc: Option<f64> = None;
        let mut converged = false;

        for iteration in 1..=settings.max_iters {
            for k in 0..=m {
                problem.operator.apply_to_slice(&w[k], &mut lap);
                let (a, b) = (a_nodes[k].values(), b_nodes[k].values());
                for x in 0..len {
                    rhs[k][x] = a[x] * lap[x] + b[x];
                }
            }
            let mut increment = 0.0_f64;
            let mut scale = 0.0_f64;
            let mut running: Vec<CompensatedSum> = start
                .iter()
                .map(|&v| {
                    let mut c = CompensatedSum::new();
                    c.add(v);
                    c
                })
                .collect();
            for k in 0..=m {
                if k > 0 {
                    let tau = node_t[k] - node_t[k - 1];
                    for x in 0..len {
                        running[x].add(0.5 * tau * (rhs[k - 1][x] + rhs[k][x]));
                    }
                }
                for x in 0..len {
                    let v = running[x].value();
                    increment = increment.max((v - w[k][x]).abs());
                    scale = scale.max(v.abs());
                    w[k][x] = v;
                }
            }
            let ratio = prev_inc.map(|p| if p > 0.0 { increment / p } else { 0.0 });
            iterations.push(IterationRecord { slab, iteration, increment, contraction_estimate: ratio });
            if increment <= settings.tol {
                converged = true;
                break;
            }
            let rounding_floor = 64.0 * f64::EPSILON * (scale + 1.0);
            if let Some(r) = ratio {
                if r >= 1.0 && increment > rounding_floor {
                    return Err(Error::NoContraction { slab, ratio: r });
                }
            }
            prev_inc = Some(increment);
        }
        if !converged {
            return Err(Error::MaxIters { slab, iters: settings.max_iters });
        }
        for k in 1..=m {
            times.push(node_t[k]);
            fields.push(Field::from_values(grid, w[k].clone())?);
        }
        start = w[m].clone();
    }
    Ok(DualSolution { times, fields, iterations, schedule })
}

/// The transformed test function `φ_in` and the dual solve behind it.
#[derive(Debug, Clone)]
pub struct CorollarySolution {
    /// Increasing times in `[0, T]`.
    pub times: Vec<f64>,
    pub phi_in: Vec<Field>,
    pub dual: DualSolution,
    pub t_final: f64,
}

/// Inputs shared by [`corollary_test_function`] and [`corollary_residual`].
#[derive(Debug, Clone)]
pub struct CorollaryData<'a> {
    pub trajectory: &'a Trajectory,
    pub species: Species,
    pub lambda: f64,
    /// Nonpositive, bounded forcing `ψ(t, x)`.
    pub psi: TimeField,
    pub operator: &'a NonlocalOperator,
    pub params: &'a ModelParams,
}

impl CorollaryData<'_> {
    fn t_final(&self) -> Result<f64> {
        self.trajectory.final_time().ok_or_else(|| Error::InvalidArgument("trajectory has no snapshots".into()))
    }

    /// `p̃_i(u(t))` as a sampled field on the trajectory snapshots.
    fn p_tilde_forward(&self) -> Result<TimeField> {
        let snaps = &self.trajectory.snapshots;
        let times = snaps.iter().map(|(t, _)| *t).collect();
        let fields = snaps.iter().map(|(_, u)| crate::model::p_tilde_i(self.params, self.species, u)).collect();
        TimeField::sampled(times, fields)
    }
}

/// Builds and solves the dual problem with `ρ = J_n`, `a = p̃_i(u(T−t))`,
/// `b = −e^{λt} ψ(T−t) √p̃_i(u(T−t))`, `c = 0`, then maps the solution to
/// `φ_in(t) = e^{−λ(T−t)} φ(T−t)`.
pub fn corollary_test_function(data: &CorollaryData<'_>, settings: &PicardSettings) -> Result<CorollarySolution> {
    let t_final = data.t_final()?;
    let grid = *data.operator.grid();
    if *data.trajectory.snapshots[0].1.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if !(data.lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be nonnegative, got {}", data.lambda)));
    }
    let probe_times = data.trajectory.snapshots.iter().map(|(t, _)| *t);
    for t in probe_times {
        let psi = data.psi.at(t);
        if psi.max_value() > 0.0 || !psi.is_finite() {
            return Err(Error::InvalidArgument(format!("psi must be bounded and nonpositive (violated at t = {t})")));
        }
    }

    let forward = data.p_tilde_forward()?;
    let a = match &forward {
        TimeField::Sampled { times, fields } => TimeField::sampled(
            times.iter().rev().map(|t| t_final - t).collect(),
            fields.iter().rev().cloned().collect(),
        )?,
        _ => unreachable!("p_tilde_forward returns samples"),
    };
    let psi = data.psi.clone();
    let lambda = data.lambda;
    let b = TimeField::function(move |t| {
        let s = t_final - t;
        let ptilde = forward.at(s);
        let psi = psi.at(s);
        let factor = -(lambda * t).exp();
        ptilde.zip_map(&psi, |p, q| factor * q * p.max(0.0).sqrt()).expect("shared grid")
    });

    let problem = DualProblem::new(data.operator.kernel().clone(), grid, a, b, Field::zeros(grid), t_final)?;
    let dual = solve_dual(&problem, settings)?;

    let mut times = Vec::with_capacity(dual.times.len());
    let mut phi_in = Vec::with_capacity(dual.times.len());
    for (s, phi) in dual.times.iter().zip(&dual.fields).rev() {
        let t = t_final - s;
        let damp = (-lambda * s).exp();
        times.push(t.max(0.0));
        phi_in.push(phi.scaled(damp));
    }
    Ok(CorollarySolution { times, phi_in, dual, t_final })
}

/// Discrete `L²(Q_T)` norm of `∂_t φ_in + p̃_i Δⁿ φ_in − λ φ_in − √p̃_i ψ`.
///
/// The equation is evaluated in the equivalent integrating-factor form
/// `e^{−λ(T−t)} [∂_t g + p̃_i Δⁿ g − e^{λ(T−t)} √p̃_i ψ]` with
/// `g = e^{λ(T−t)} φ_in`, using a difference quotient for `∂_t g` and the
/// trapezoid average of the remaining terms on each time step.
pub fn corollary_residual(data: &CorollaryData<'_>, sol: &CorollarySolution) -> Result<f64> {
    let op = data.operator;
    let grid = *op.grid();
    let dv = grid.cell_volume();
    let forward = data.p_tilde_forward()?;
    let lambda = data.lambda;
    let t_final = sol.t_final;
    let lift = |k: usize| (lambda * (t_final - sol.times[k])).exp();
    let g: Vec<Field> = (0..sol.times.len()).map(|k| sol.phi_in[k].scaled(lift(k))).collect();
    let source = |k: usize| -> Result<Vec<f64>> {
        let t = sol.times[k];
        let pt = forward.at(t);
        let psi = data.psi.at(t);
        let lap = op.apply(&g[k])?;
        let e = lift(k);
        Ok((0..grid.len())
            .map(|x| {
                let p = pt.values()[x];
                p * lap.values()[x] - e * p.max(0.0).sqrt() * psi.values()[x]
            })
            .collect())
    };
    let mut acc = CompensatedSum::new();
    let mut prev = source(0)?;
    for k in 1..sol.times.len() {
        let cur = source(k)?;
        let tau = sol.times[k] - sol.times[k - 1];
        let damp = (-lambda * (t_final - 0.5 * (sol.times[k] + sol.times[k - 1]))).exp();
        let (g0, g1) = (g[k - 1].values(), g[k].values());
        for x in 0..grid.len() {
            let r = damp * ((g1[x] - g0[x]) / tau + 0.5 * (prev[x] + cur[x]));
            acc.add(tau * r * r * dv);
        }
        prev = cur;
    }
    Ok(acc.value().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{compute_c1, discretize, KernelFamily, KernelKind, KernelProfile};

    fn rho(n: u32, cells: usize) -> (DiscreteKernel, Grid) {
        let p = KernelProfile::new(KernelFamily::PolynomialBump, 1.0, 1).unwrap();
        let c = compute_c1(&p, 1024);
        let g = Grid::new_1d(1.0, cells).unwrap();
        (discretize(&p, &c, n, &g, 8.0, KernelKind::Rescaled).unwrap(), g)
    }

    #[test]
    fn zero_coefficient_gives_linear_growth() {
        let (k, g) = rho(4, 64);
        let prob = DualProblem::new(
            k,
            g,
            TimeField::Steady(Field::zeros(g)),
            TimeField::Steady(Field::constant(g, 1.0)),
            Field::zeros(g),
            0.5,
        )
        .unwrap();
        let sol = solve_dual(&prob, &PicardSettings::default()).unwrap();
        for (t, f) in sol.times.iter().zip(&sol.fields) {
            assert!(f.values().iter().all(|&v| (v - t).abs() < 1e-12));
        }
    }

    #[test]
    fn constants_are_preserved() {
        let (k, g) = rho(4, 64);
        let a = TimeField::function(move |t| Field::from_fn(g, |c| 1.0 + t + c[0]));
        let prob =
            DualProblem::new(k, g, a, TimeField::Steady(Field::zeros(g)), Field::constant(g, 2.5), 0.01).unwrap();
        let sol = solve_dual(&prob, &PicardSettings::default()).unwrap();
        assert!(sol.schedule.slab_count > 1);
        for f in &sol.fields {
            assert!(f.values().iter().all(|&v| (v - 2.5).abs() < 1e-12));
        }
    }

    #[test]
    fn observed_contraction_respects_bound() {
        let (k, g) = rho(4, 64);
        let a = TimeField::Steady(Field::from_fn(g, |c| 1.0 + c[0]));
        let b = TimeField::Steady(Field::from_fn(g, |c| (7.0 * c[0]).sin()));
        let c = Field::from_fn(g, |c| c[0] * c[0]);
        let prob = DualProblem::new(k, g, a, b, c, 0.01).unwrap();
        let sol = solve_dual(&prob, &PicardSettings::default()).unwrap();
        assert!(sol.schedule.contraction_bound < 1.0);
        assert!(sol.max_contraction() <= sol.schedule.contraction_bound * (1.0 + 1e-9));
    }

    #[test]
    fn sampled_field_interpolates_linearly() {
        let g = Grid::new_1d(1.0, 4).unwrap();
        let tf = TimeField::sampled(vec![0.0, 1.0], vec![Field::zeros(g), Field::constant(g, 2.0)]).unwrap();
        assert_eq!(tf.at(0.25).values()[0], 0.5);
        assert_eq!(tf.at(5.0).values()[0], 2.0);
        assert_eq!(tf.sup_norm(1.0), 2.0);
        assert!(TimeField::sampled(vec![1.0, 0.0], vec![Field::zeros(g), Field::zeros(g)]).is_err());
    }

    #[test]
    fn iteration_cap_is_reported() {
        let (k, g) = rho(4, 64);
        let a = TimeField::Steady(Field::constant(g, 1.0));
        let b = TimeField::Steady(Field::from_fn(g, |c| c[0]));
        let prob = DualProblem::new(k, g, a, b, Field::zeros(g), 0.01).unwrap();
        let settings = PicardSettings { max_iters: 2, ..PicardSettings::default() };
        assert!(matches!(solve_dual(&prob, &settings), Err(Error::MaxIters { .. })));
    }
}
