//! The nonlocal diffusion operator `Δⁿφ(x) = ∫_Ω J_n(x−y)(φ(y)−φ(x)) dy`.
//!
//! The integral is restricted to Ω: stencil offsets that leave the box are
//! dropped rather than filled with ghost values. Together with the even kernel
//! this pairs every interaction `(x, y)` with `(y, x)`, so the discrete
//! operator is exactly mass-neutral and self-adjoint.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{lq_norm_space, Field, Grid};
use crate::kernel::DiscreteKernel;
use crate::numerics::{compensated_sum, CompensatedSum};

/// Below this many kernel evaluations per sweep the operator runs serially.
const PARALLEL_WORK_THRESHOLD: usize = 1 << 17;

/// Relative magnitude a field may keep on the outermost cell layer and still
/// count as vanishing at ∂Ω.
pub const BOUNDARY_VANISH_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct NonlocalOperator {
    kernel: DiscreteKernel,
    grid: Grid,
}

impl NonlocalOperator {
    pub fn new(kernel: DiscreteKernel, grid: Grid) -> Result<Self> {
        if kernel.dim() != grid.dim() {
            return Err(Error::GridMismatch);
        }
        if ((kernel.h() - grid.h()) / grid.h()).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "kernel built for spacing {} applied on grid with spacing {}",
                kernel.h(),
                grid.h()
            )));
        }
        Ok(Self { kernel, grid })
    }

    pub fn kernel(&self) -> &DiscreteKernel {
        &self.kernel
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Calls `visit(weight, neighbour)` for every admissible offset of `idx`.
    #[inline]
    fn for_each_neighbour(&self, idx: usize, mut visit: impl FnMut(f64, usize)) {
        let nx = self.grid.nx() as i64;
        let ny = self.grid.ny() as i64;
        let (ix, iy) = self.grid.coords(idx);
        let (ix, iy) = (ix as i64, iy as i64);
        for row in self.kernel.rows() {
            let y = iy + row.ky;
            if y < 0 || y >= ny {
                continue;
            }
            let lo = (-row.half_width).max(-ix);
            let hi = row.half_width.min(nx - 1 - ix);
            let base = y * nx + ix;
            for kx in lo..=hi {
                let w = row.weights[(kx + row.half_width) as usize];
                visit(w, (base + kx) as usize);
            }
        }
    }

    fn cell_apply(&self, f: &[f64], idx: usize) -> f64 {
        let fx = f[idx];
        let mut acc = CompensatedSum::new();
        self.for_each_neighbour(idx, |w, j| acc.add(w * (f[j] - fx)));
        acc.value()
    }

    fn cell_dissipation(&self, f: &[f64], idx: usize) -> f64 {
        let fx = f[idx];
        let mut acc = CompensatedSum::new();
        self.for_each_neighbour(idx, |w, j| {
            let d = f[j] - fx;
            acc.add(w * d * d);
        });
        acc.value()
    }

    fn sweep(&self, out: &mut [f64], cell: impl Fn(usize) -> f64 + Sync) {
        if self.grid.len() * self.kernel.len() < PARALLEL_WORK_THRESHOLD {
            out.iter_mut().enumerate().for_each(|(i, o)| *o = cell(i));
        } else {
            out.par_iter_mut().enumerate().with_min_len(64).for_each(|(i, o)| *o = cell(i));
        }
    }

    /// Writes `Δⁿ f` into `out`; both slices must have the grid's length.
    pub fn apply_to_slice(&self, f: &[f64], out: &mut [f64]) {
        debug_assert_eq!(f.len(), self.grid.len());
        debug_assert_eq!(out.len(), self.grid.len());
        self.sweep(out, |i| self.cell_apply(f, i));
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        self.check(f)?;
        let mut out = Field::zeros(self.grid);
        self.apply_to_slice(f.values(), out.values_mut());
        Ok(out)
    }

    /// `∬_{Ω×Ω} J_n(x−y)(f(x)−f(y))² dy dx` for one time slice.
    pub fn dissipation(&self, f: &Field) -> Result<f64> {
        self.check(f)?;
        Ok(self.dissipation_of_slice(f.values()))
    }

    pub(crate) fn dissipation_of_slice(&self, f: &[f64]) -> f64 {
        let mut per_cell = vec![0.0; self.grid.len()];
        self.sweep(&mut per_cell, |i| self.cell_dissipation(f, i));
        compensated_sum(per_cell) * self.grid.cell_volume()
    }

    /// Sum of admissible weights at each cell (the diagonal of `−Δⁿ`).
    pub fn row_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        self.sweep(&mut out, |i| {
            let mut acc = CompensatedSum::new();
            self.for_each_neighbour(i, |w, _| acc.add(w));
            acc.value()
        });
        out
    }

    fn check(&self, f: &Field) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `‖Δⁿξ‖_{L^p} / ‖ξ‖_{W^{2,p}}` for a field vanishing near ∂Ω.
    pub fn lemma4_ratio(&self, xi: &Field, p: f64) -> Result<f64> {
        self.check(xi)?;
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("exponent p must be >= 1, got {p}")));
        }
        let peak = xi.max_abs();
        if peak == 0.0 {
            return Err(Error::Degenerate("ratio undefined for the zero field".into()));
        }
        if let Some((cell, value)) =
            boundary_layer(&self.grid).map(|i| (i, xi.values()[i])).find(|(_, v)| v.abs() > BOUNDARY_VANISH_TOL * peak)
        {
            return Err(Error::NotCompactlySupported { cell, value });
        }
        let num = lq_norm_space(&self.apply(xi)?, p)?;
        let den = w2p_norm(xi, p)?;
        Ok(num / den)
    }
}

/// Indices of the outermost ring of cells.
fn boundary_layer(grid: &Grid) -> impl Iterator<Item = usize> + '_ {
    let (nx, ny, dim) = (grid.nx(), grid.ny(), grid.dim());
    (0..grid.len()).filter(move |&i| {
        let (ix, iy) = grid.coords(i);
        ix == 0 || ix == nx - 1 || (dim == 2 && (iy == 0 || iy == ny - 1))
    })
}

/// `W^{2,p}` norm, `(Σ_{|α|≤2} ‖D^α f‖_p^p)^{1/p}`, from centred difference
/// quotients with the field extended by zero outside Ω.
pub fn w2p_norm(f: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent p must be >= 1, got {p}")));
    }
    let g = *f.grid();
    let h = g.h();
    let (nx, ny) = (g.nx() as i64, g.ny() as i64);
    let v = f.values();
    let at = |ix: i64, iy: i64| -> f64 {
        if ix < 0 || ix >= nx || iy < 0 || iy >= ny {
            0.0
        } else {
            v[(iy * nx + ix) as usize]
        }
    };
    let mut acc = CompensatedSum::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let c = at(ix, iy);
            let mut s = c.abs().powf(p);
            let dx = (at(ix + 1, iy) - at(ix - 1, iy)) / (2.0 * h);
            let dxx = (at(ix + 1, iy) - 2.0 * c + at(ix - 1, iy)) / (h * h);
            s += dx.abs().powf(p) + dxx.abs().powf(p);
            if g.dim() == 2 {
                let dy = (at(ix, iy + 1) - at(ix, iy - 1)) / (2.0 * h);
                let dyy = (at(ix, iy + 1) - 2.0 * c + at(ix, iy - 1)) / (h * h);
                let dxy =
                    (at(ix + 1, iy + 1) - at(ix + 1, iy - 1) - at(ix - 1, iy + 1) + at(ix - 1, iy - 1)) / (4.0 * h * h);
                s += dy.abs().powf(p) + dyy.abs().powf(p) + dxy.abs().powf(p);
            }
            acc.add(s);
        }
    }
    Ok((acc.value() * g.cell_volume()).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{compute_c1, discretize, KernelFamily, KernelKind, KernelProfile};

    fn op_1d(family: KernelFamily, extent: f64, cells: usize, n: u32) -> NonlocalOperator {
        let p = KernelProfile::new(family, 1.0, 1).unwrap();
        let c = compute_c1(&p, 4096);
        let g = Grid::new_1d(extent, cells).unwrap();
        let k = discretize(&p, &c, n, &g, 8.0, KernelKind::Rescaled).unwrap();
        NonlocalOperator::new(k, g).unwrap()
    }

    #[test]
    fn constant_field_maps_to_zero() {
        let op = op_1d(KernelFamily::Tent, 1.0, 128, 4);
        let out = op.apply(&Field::constant(*op.grid(), 3.7)).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
        assert_eq!(op.dissipation(&Field::constant(*op.grid(), 3.7)).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_interior_value_is_two() {
        // Δⁿ x² = C₁ ∫ J(z) z² dz = 2 away from the boundary.
        for fam in [KernelFamily::Tent, KernelFamily::PolynomialBump] {
            let op = op_1d(fam, 2.0, 512, 8);
            let f = Field::from_fn(*op.grid(), |c| c[0] * c[0]);
            let out = op.apply(&f).unwrap();
            let inner = crate::grid::restrict_interior(&out, 1.0 / 8.0 + 2.0 / 256.0).unwrap();
            assert!(inner.count() > 0);
            for (_, v) in inner.iter() {
                assert!((v - 2.0).abs() < 1e-2, "{fam}: {v}");
            }
        }
    }

    #[test]
    fn dissipation_is_quadratic() {
        let op = op_1d(KernelFamily::PolynomialBump, 1.0, 128, 4);
        let f = Field::from_fn(*op.grid(), |c| (9.0 * c[0]).sin() + c[0]);
        let d1 = op.dissipation(&f).unwrap();
        let d2 = op.dissipation(&f.scaled(2.0)).unwrap();
        assert!(d1 > 0.0);
        assert!((d2 - 4.0 * d1).abs() <= 1e-12 * d2);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let op = op_1d(KernelFamily::Tent, 1.0, 128, 4);
        let other = Field::zeros(Grid::new_1d(1.0, 64).unwrap());
        assert!(matches!(op.apply(&other), Err(Error::GridMismatch)));
        assert!(matches!(op.dissipation(&other), Err(Error::GridMismatch)));
    }

    #[test]
    fn lemma4_guards() {
        let op = op_1d(KernelFamily::PolynomialBump, 1.0, 256, 4);
        let g = *op.grid();
        assert!(matches!(op.lemma4_ratio(&Field::zeros(g), 3.0), Err(Error::Degenerate(_))));
        assert!(matches!(op.lemma4_ratio(&Field::constant(g, 1.0), 3.0), Err(Error::NotCompactlySupported { .. })));
        let bump = Field::from_fn(g, |c| (c[0] * (1.0 - c[0])).powi(2));
        let r1 = op.lemma4_ratio(&bump, 3.0).unwrap();
        let r5 = op.lemma4_ratio(&bump.scaled(5.0), 3.0).unwrap();
        assert!((r1 - r5).abs() <= 1e-12 * r1);
        assert!(r1.is_finite() && r1 > 0.0);
    }

    #[test]
    fn row_sums_equal_kernel_mass_in_the_interior() {
        let op = op_1d(KernelFamily::Uniform, 1.0, 256, 4);
        let sums = op.row_sums();
        let mass = op.kernel().total_weight();
        assert!((sums[128] - mass).abs() <= 1e-12 * mass);
        assert!(sums[0] < 0.6 * mass);
    }
}
