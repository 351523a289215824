//! Pointwise consistency `Δⁿψ → Δψ` on smooth test functions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Result;
use crate::grid::{restrict_interior, Field, Grid};
use crate::kernel::{compute_c1, discretize, KernelKind};
use crate::nonlocal_op::NonlocalOperator;
use crate::numerics::rate_log2;

use super::config::KernelSpec;

/// Smooth functions with closed-form Laplacians.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    Constant,
    /// `Σ_d x_d²`.
    Quadratic,
    /// `Π_d cos(2π x_d)`.
    Cosine,
    /// `(1 − ρ²/R²)⁴` around the centre of Ω with `R` a quarter of the
    /// shortest side; compactly supported inside Ω.
    PolynomialBump,
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Constant => "constant",
            Self::Quadratic => "quadratic",
            Self::Cosine => "cosine",
            Self::PolynomialBump => "polynomial_bump",
        })
    }
}

impl FromStr for TestFunction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "constant" => Ok(Self::Constant),
            "quadratic" => Ok(Self::Quadratic),
            "cosine" => Ok(Self::Cosine),
            "polynomial_bump" => Ok(Self::PolynomialBump),
            _ => Err(format!("unknown test function '{s}' (expected constant, quadratic, cosine or polynomial_bump)")),
        }
    }
}

impl TestFunction {
    fn bump_geometry(grid: &Grid) -> ([f64; 2], f64) {
        let ext = grid.extent();
        let short = ext[..grid.dim()].iter().copied().fold(f64::INFINITY, f64::min);
        ([0.5 * ext[0], 0.5 * ext[1]], 0.25 * short)
    }

    fn dist2(grid: &Grid, x: [f64; 2], c: [f64; 2]) -> f64 {
        let dx = x[0] - c[0];
        let dy = if grid.dim() == 2 { x[1] - c[1] } else { 0.0 };
        dx * dx + dy * dy
    }

    pub fn sample(&self, grid: &Grid) -> Field {
        let dim = grid.dim();
        match self {
            Self::Constant => Field::constant(*grid, 1.0),
            Self::Quadratic => Field::from_fn(*grid, |x| x[..dim].iter().map(|v| v * v).sum()),
            Self::Cosine => Field::from_fn(*grid, |x| x[..dim].iter().map(|v| (2.0 * PI * v).cos()).product()),
            Self::PolynomialBump => {
                let (c, r) = Self::bump_geometry(grid);
                Field::from_fn(*grid, |x| {
                    let q = 1.0 - Self::dist2(grid, x, c) / (r * r);
                    if q > 0.0 {
                        q.powi(4)
                    } else {
                        0.0
                    }
                })
            }
        }
    }

    pub fn laplacian(&self, grid: &Grid) -> Field {
        let dim = grid.dim() as f64;
        match self {
            Self::Constant => Field::zeros(*grid),
            Self::Quadratic => Field::constant(*grid, 2.0 * dim),
            Self::Cosine => self.sample(grid).scaled(-4.0 * PI * PI * dim),
            Self::PolynomialBump => {
                let (c, r) = Self::bump_geometry(grid);
                let r2 = r * r;
                Field::from_fn(*grid, |x| {
                    let rho2 = Self::dist2(grid, x, c);
                    let q = 1.0 - rho2 / r2;
                    if q > 0.0 {
                        -8.0 * dim * q.powi(3) / r2 + 48.0 * rho2 * q * q / (r2 * r2)
                    } else {
                        0.0
                    }
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub n: u32,
    pub max_err: f64,
    /// `log₂(e_prev / e_n)` against the previous row when `n` doubled.
    pub rate: Option<f64>,
}

/// `max |Δⁿψ − Δψ|` over cells at least `r/n + 2h` from ∂Ω, for every `n`.
pub fn run_consistency_test(
    kernel: &KernelSpec,
    grid: &Grid,
    n_list: &[u32],
    function: TestFunction,
) -> Result<Vec<ConsistencyRow>> {
    let profile = kernel.profile(grid.dim())?;
    let c1 = compute_c1(&profile, kernel.quad_resolution);
    let psi = function.sample(grid);
    let exact = function.laplacian(grid);
    let mut rows: Vec<ConsistencyRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let k = discretize(&profile, &c1, n, grid, kernel.min_cells_per_radius, KernelKind::Rescaled)?;
        let op = NonlocalOperator::new(k, *grid)?;
        let err = op.apply(&psi)?.axpy(-1.0, &exact)?;
        let margin = kernel.radius / n as f64 + 2.0 * grid.h();
        let max_err = restrict_interior(&err, margin)?.max_abs();
        let rate = rows.last().filter(|prev| prev.n * 2 == n).map(|prev| rate_log2(prev.max_err, max_err));
        rows.push(ConsistencyRow { n, max_err, rate });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_laplacian_matches_differences() {
        for g in [Grid::new_1d(1.0, 2048).unwrap(), Grid::new_2d(1.0, 1.0, 256, 256).unwrap()] {
            let f = TestFunction::PolynomialBump.sample(&g);
            let lap = TestFunction::PolynomialBump.laplacian(&g);
            let fd = crate::local_solver::neumann_laplacian(&g, &f).unwrap();
            let err = fd.axpy(-1.0, &lap).unwrap().max_abs();
            assert!(err < 2e-2 * lap.max_abs(), "{err}");
        }
    }

    #[test]
    fn constant_has_zero_error() {
        let g = Grid::new_1d(1.0, 512).unwrap();
        let rows = run_consistency_test(&KernelSpec::default(), &g, &[4, 8, 16], TestFunction::Constant).unwrap();
        assert!(rows.iter().all(|r| r.max_err == 0.0));
    }

    #[test]
    fn rates_only_between_doublings() {
        let g = Grid::new_1d(1.0, 512).unwrap();
        let rows = run_consistency_test(&KernelSpec::default(), &g, &[4, 8, 12], TestFunction::Cosine).unwrap();
        assert!(rows[0].rate.is_none());
        assert!(rows[1].rate.is_some());
        assert!(rows[2].rate.is_none());
    }

    #[test]
    fn names_round_trip() {
        for f in [TestFunction::Constant, TestFunction::Quadratic, TestFunction::Cosine, TestFunction::PolynomialBump] {
            assert_eq!(f.to_string().parse::<TestFunction>().unwrap(), f);
        }
    }
}
