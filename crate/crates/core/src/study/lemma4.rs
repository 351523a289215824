//! Boundedness audit of `‖Δⁿξ‖_p / ‖ξ‖_{W^{2,p}}` across scales.

use serde::Serialize;

use crate::error::Result;
use crate::grid::Grid;
use crate::kernel::{compute_c1, discretize, KernelKind};
use crate::nonlocal_op::NonlocalOperator;

use super::config::KernelSpec;
use super::consistency::TestFunction;

/// Largest allowed spread `max ratio / min ratio` over the scales audited.
pub const LEMMA4_SPREAD_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma4Row {
    pub n: u32,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma4Audit {
    pub p: f64,
    pub rows: Vec<Lemma4Row>,
    /// `max / min` of the ratios.
    pub spread: f64,
}

impl Lemma4Audit {
    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| r.ratio.is_finite())
    }

    pub fn bounded(&self) -> bool {
        self.all_finite() && self.spread <= LEMMA4_SPREAD_LIMIT
    }
}

/// Evaluates the ratio on the compactly supported polynomial bump for each `n`.
pub fn run_lemma4_audit(kernel: &KernelSpec, grid: &Grid, n_list: &[u32], p: f64) -> Result<Lemma4Audit> {
    let profile = kernel.profile(grid.dim())?;
    let c1 = compute_c1(&profile, kernel.quad_resolution);
    let xi = TestFunction::PolynomialBump.sample(grid);
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let k = discretize(&profile, &c1, n, grid, kernel.min_cells_per_radius, KernelKind::Rescaled)?;
        let ratio = NonlocalOperator::new(k, *grid)?.lemma4_ratio(&xi, p)?;
        rows.push(Lemma4Row { n, ratio });
    }
    let max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(Lemma4Audit { p, rows, spread: max / min })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_are_finite_and_bounded() {
        let g = Grid::new_1d(1.0, 512).unwrap();
        let audit = run_lemma4_audit(&KernelSpec::default(), &g, &[4, 8, 16, 32], 3.0).unwrap();
        assert!(audit.all_finite());
        assert!(audit.bounded(), "{audit:?}");
    }
}
