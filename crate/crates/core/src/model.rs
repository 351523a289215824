//! SKT nonlinearities, reaction terms and the entropy functional.
//!
//! For `i ≠ j`:
//!
//! * diffusion `p_i(u) = u_i (c_i + a_i u_i + u_j)`
//! * reaction `f_i(u) = u_i (α_i − β_i1 u_1 − β_i2 u_2)`
//! * `p̃_i(u) = p_i(u)/u_i = c_i + a_i u_i + u_j`, evaluated without the division
//! * entropy `E(u) = Σ_i ∫ (u_i (ln u_i − 1) + 1)`

use crate::error::{Error, Result};
use crate::grid::{Field, Species, SpeciesPair};
use crate::numerics::compensated_sum;

/// Nonnegative SKT coefficients and the final time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub c: [f64; 2],
    pub a: [f64; 2],
    pub alpha: [f64; 2],
    pub beta: [[f64; 2]; 2],
    pub t_final: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let entries = self.c.iter().chain(&self.a).chain(&self.alpha).chain(self.beta.iter().flatten());
        if entries.clone().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("model coefficients must be finite and nonnegative".into()));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidArgument(format!("t_final must be positive, got {}", self.t_final)));
        }
        Ok(())
    }

    /// Convergence to the local problem additionally needs `a_i > 0`.
    pub fn validate_for_convergence(&self) -> Result<()> {
        self.validate()?;
        if self.a.iter().any(|&a| a <= 0.0) {
            return Err(Error::InvalidArgument("convergence studies require a1 > 0 and a2 > 0".into()));
        }
        Ok(())
    }

    /// True when both reaction terms vanish identically.
    pub fn reactions_vanish(&self) -> bool {
        self.alpha == [0.0; 2] && self.beta == [[0.0; 2]; 2]
    }

    #[inline]
    pub fn p_at(&self, s: Species, ui: f64, uj: f64) -> f64 {
        let i = s.index();
        ui * (self.c[i] + self.a[i] * ui + uj)
    }

    #[inline]
    pub fn p_tilde_at(&self, s: Species, ui: f64, uj: f64) -> f64 {
        let i = s.index();
        self.c[i] + self.a[i] * ui + uj
    }

    /// `f_i` at a point, given `(u₁, u₂)` in storage order.
    #[inline]
    pub fn f_at(&self, s: Species, u: [f64; 2]) -> f64 {
        let i = s.index();
        u[i] * (self.alpha[i] - self.beta[i][0] * u[0] - self.beta[i][1] * u[1])
    }

    /// `|∂p_i/∂u_i| = c_i + 2 a_i u_i + u_j`.
    #[inline]
    pub fn dp_dui_at(&self, s: Species, ui: f64, uj: f64) -> f64 {
        let i = s.index();
        self.c[i] + 2.0 * self.a[i] * ui + uj
    }
}

fn pointwise(u: &SpeciesPair, s: Species, f: impl Fn(f64, f64) -> f64) -> Field {
    u.get(s).zip_map(u.get(s.other()), f).expect("species share a grid")
}

pub fn p_i(params: &ModelParams, s: Species, u: &SpeciesPair) -> Field {
    pointwise(u, s, |ui, uj| params.p_at(s, ui, uj))
}

pub fn f_i(params: &ModelParams, s: Species, u: &SpeciesPair) -> Field {
    u.u1().zip_map(u.u2(), |a, b| params.f_at(s, [a, b])).expect("species share a grid")
}

pub fn p_tilde_i(params: &ModelParams, s: Species, u: &SpeciesPair) -> Field {
    pointwise(u, s, |ui, uj| params.p_tilde_at(s, ui, uj))
}

/// `s (ln s − 1) + 1`, continuous at `s = 0`.
#[inline]
pub fn entropy_density(s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        s * (s.ln() - 1.0) + 1.0
    }
}

/// `E(u) = Σ_i Σ_cells (u_i (ln u_i − 1) + 1) h^N`.
pub fn entropy(u: &SpeciesPair) -> Result<f64> {
    let dv = u.grid().cell_volume();
    let mut total = 0.0;
    for s in Species::BOTH {
        let f = u.get(s);
        if let Some((cell, &value)) = f.values().iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeInput { cell, value });
        }
        total += compensated_sum(f.values().iter().map(|&v| entropy_density(v))) * dv;
    }
    Ok(total)
}
