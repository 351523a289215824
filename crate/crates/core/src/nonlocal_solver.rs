//! Explicit integrator for the nonlocal SKT system
//! `∂_t u_i = Δⁿ p_i(u) + f_i(u)`.
//!
//! The step size follows the Lipschitz bound of the `C₁ n²`-scaled operator,
//! so `dt ~ n⁻²`. Positivity is enforced by that restriction; cells that still
//! drop below `−positivity_tol` abort the run.

use crate::error::{Error, Result};
use crate::grid::{Grid, SpeciesPair};
use crate::integrator::{self, Scheme, SolverSettings, Trajectory};
use crate::kernel::KernelKind;
use crate::model::ModelParams;
use crate::nonlocal_op::NonlocalOperator;

#[derive(Debug, Clone)]
pub struct NonlocalRunConfig {
    operator: NonlocalOperator,
    params: ModelParams,
    initial: SpeciesPair,
    settings: SolverSettings,
    snapshot_times: Vec<f64>,
}

impl NonlocalRunConfig {
    pub fn new(
        operator: NonlocalOperator,
        params: ModelParams,
        initial: SpeciesPair,
        settings: SolverSettings,
        snapshot_times: Vec<f64>,
    ) -> Result<Self> {
        if operator.kernel().kind() != KernelKind::Rescaled {
            return Err(Error::InvalidArgument("the nonlocal solver needs a rescaled kernel J_n".into()));
        }
        params.validate()?;
        settings.validate()?;
        integrator::validate_initial(&initial, operator.grid())?;
        integrator::validate_snapshot_times(&snapshot_times, params.t_final)?;
        Ok(Self { operator, params, initial, settings, snapshot_times })
    }

    pub fn operator(&self) -> &NonlocalOperator {
        &self.operator
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn initial(&self) -> &SpeciesPair {
        &self.initial
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    pub fn snapshot_times(&self) -> &[f64] {
        &self.snapshot_times
    }
}

impl Scheme for NonlocalRunConfig {
    fn grid(&self) -> &Grid {
        self.operator.grid()
    }

    fn params(&self) -> &ModelParams {
        &self.params
    }

    fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    fn diffuse(&self, p: &[f64], out: &mut [f64]) {
        self.operator.apply_to_slice(p, out);
    }

    fn diffusive_dt(&self, l_p: f64) -> f64 {
        let k = self.operator.kernel();
        let n = k.scale_n() as f64;
        self.settings.dt_safety / (2.0 * k.c1() * n * n * l_p)
    }

    fn dissipation(&self, u: &[f64]) -> f64 {
        self.operator.dissipation_of_slice(u)
    }
}

/// `dt_safety / (2 C₁ n² L_p)`, capped by the reaction bound and `dt_max`.
pub fn stable_dt(config: &NonlocalRunConfig, u: &SpeciesPair) -> f64 {
    integrator::stable_dt(config, u)
}

/// One forward-Euler step of size `dt`.
pub fn step(config: &NonlocalRunConfig, u: &SpeciesPair, dt: f64) -> Result<SpeciesPair> {
    integrator::step(config, u, dt, dt)
}

/// Integrates to `T`; errors carry the time at which they occurred.
pub fn run(config: &NonlocalRunConfig) -> Result<Trajectory> {
    integrator::run(config, &config.initial, &config.snapshot_times)
}
