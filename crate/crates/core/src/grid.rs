//! Axis-aligned box grids, cell-centred scalar fields and the reductions used
//! by every diagnostic.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::compensated_sum;

/// Uniform cell-centred grid on `[0, Lx]` or `[0, Lx] × [0, Ly]`.
///
/// Spacing is equal along every axis. Cells are stored row-major: the index of
/// cell `(ix, iy)` is `iy * nx + ix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    extent: [f64; 2],
    cells: [usize; 2],
    h: f64,
}

pub const MIN_CELLS_PER_AXIS: usize = 4;

impl Grid {
    pub fn new_1d(extent: f64, cells: usize) -> Result<Self> {
        Self::check_axis(extent, cells)?;
        Ok(Self { dim: 1, extent: [extent, 0.0], cells: [cells, 1], h: extent / cells as f64 })
    }

    pub fn new_2d(extent_x: f64, extent_y: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::check_axis(extent_x, nx)?;
        Self::check_axis(extent_y, ny)?;
        let hx = extent_x / nx as f64;
        let hy = extent_y / ny as f64;
        if ((hx - hy) / hx).abs() > 1e-12 {
            return Err(Error::InvalidGrid(format!("spacing must be equal on both axes (hx = {hx}, hy = {hy})")));
        }
        Ok(Self { dim: 2, extent: [extent_x, extent_y], cells: [nx, ny], h: hx })
    }

    /// Unit-spaced constructor used by the CLI and config layer.
    pub fn new(dim: usize, extent: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        match dim {
            1 => Self::new_1d(extent[0], cells[0]),
            2 => Self::new_2d(extent[0], extent[1], cells[0], cells[1]),
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    fn check_axis(extent: f64, cells: usize) -> Result<()> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        if cells < MIN_CELLS_PER_AXIS {
            return Err(Error::InvalidGrid(format!("need at least {MIN_CELLS_PER_AXIS} cells per axis, got {cells}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.cells[0]
    }

    /// Number of rows; 1 for a one-dimensional grid.
    pub fn ny(&self) -> usize {
        self.cells[1]
    }

    pub fn extent(&self) -> [f64; 2] {
        self.extent
    }

    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell measure `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Measure of Ω.
    pub fn volume(&self) -> f64 {
        self.extent[..self.dim].iter().product()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.cells[0] + ix
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.cells[0], idx / self.cells[0])
    }

    /// Centre of cell `idx`; the second coordinate is 0 in 1D.
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let (ix, iy) = self.coords(idx);
        let x = (ix as f64 + 0.5) * self.h;
        let y = if self.dim == 2 { (iy as f64 + 0.5) * self.h } else { 0.0 };
        [x, y]
    }

    /// Grid with twice the spacing, covering the same box.
    pub fn coarsened(&self) -> Result<Self> {
        if !self.cells[0].is_multiple_of(2) || (self.dim == 2 && !self.cells[1].is_multiple_of(2)) {
            return Err(Error::InvalidGrid("cell counts must be even to coarsen".into()));
        }
        Self::new(self.dim, self.extent, [self.cells[0] / 2, (self.cells[1] / 2).max(1)])
    }
}

/// Cell-centred samples of a scalar function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.center(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { grid: self.grid, values })
    }

    pub fn scaled(&self, alpha: f64) -> Field {
        self.map(|v| alpha * v)
    }

    /// `self + alpha * other`, element-wise.
    pub fn axpy(&self, alpha: f64, other: &Field) -> Result<Field> {
        self.zip_map(other, |a, b| a + alpha * b)
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Averages each block of `2^N` cells onto the grid with doubled spacing.
    pub fn coarsen_by_two(&self) -> Result<Field> {
        let coarse = self.grid.coarsened()?;
        let mut out = Field::zeros(coarse);
        let nx = self.grid.nx();
        match self.grid.dim() {
            1 => {
                for (i, v) in out.values.iter_mut().enumerate() {
                    *v = 0.5 * (self.values[2 * i] + self.values[2 * i + 1]);
                }
            }
            _ => {
                for cy in 0..coarse.ny() {
                    for cx in 0..coarse.nx() {
                        let (fx, fy) = (2 * cx, 2 * cy);
                        let s = self.values[fy * nx + fx]
                            + self.values[fy * nx + fx + 1]
                            + self.values[(fy + 1) * nx + fx]
                            + self.values[(fy + 1) * nx + fx + 1];
                        out.values[coarse.index(cx, cy)] = 0.25 * s;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Population index `i ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    U1,
    U2,
}

impl Species {
    pub const BOTH: [Species; 2] = [Species::U1, Species::U2];

    /// Zero-based storage index.
    pub fn index(self) -> usize {
        match self {
            Species::U1 => 0,
            Species::U2 => 1,
        }
    }

    pub fn other(self) -> Species {
        match self {
            Species::U1 => Species::U2,
            Species::U2 => Species::U1,
        }
    }

    pub fn from_number(i: usize) -> Result<Species> {
        match i {
            1 => Ok(Species::U1),
            2 => Ok(Species::U2),
            _ => Err(Error::InvalidArgument(format!("species must be 1 or 2, got {i}"))),
        }
    }

    pub fn number(self) -> usize {
        self.index() + 1
    }
}

/// The densities `(u₁, u₂)` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesPair {
    u1: Field,
    u2: Field,
}

impl SpeciesPair {
    pub fn new(u1: Field, u2: Field) -> Result<Self> {
        u1.same_grid(&u2)?;
        Ok(Self { u1, u2 })
    }

    pub fn grid(&self) -> &Grid {
        self.u1.grid()
    }

    pub fn get(&self, s: Species) -> &Field {
        match s {
            Species::U1 => &self.u1,
            Species::U2 => &self.u2,
        }
    }

    pub fn get_mut(&mut self, s: Species) -> &mut Field {
        match s {
            Species::U1 => &mut self.u1,
            Species::U2 => &mut self.u2,
        }
    }

    pub fn u1(&self) -> &Field {
        &self.u1
    }

    pub fn u2(&self) -> &Field {
        &self.u2
    }

    pub fn into_parts(self) -> (Field, Field) {
        (self.u1, self.u2)
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }

    /// Convex combination `(1−θ)·self + θ·other`.
    pub fn lerp(&self, other: &SpeciesPair, theta: f64) -> Result<SpeciesPair> {
        let f = |a: f64, b: f64| a + theta * (b - a);
        SpeciesPair::new(self.u1.zip_map(&other.u1, f)?, self.u2.zip_map(&other.u2, f)?)
    }
}

/// Spatial `L^q(Ω)` norm, `(Σ |f|^q h^N)^{1/q}`.
pub fn lq_norm_space(f: &Field, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidArgument(format!("norm exponent must be >= 1, got {q}")));
    }
    let dv = f.grid().cell_volume();
    let s = compensated_sum(f.values().iter().map(|v| v.abs().powf(q)));
    Ok((s * dv).powf(1.0 / q))
}

/// Space-time `L^q(Q_T)` norm: trapezoid rule in `t` over the `q`-th powers of
/// the spatial norms.
pub fn lq_norm_spacetime(snapshots: &[(f64, Field)], q: f64) -> Result<f64> {
    if snapshots.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "space-time norm needs at least 2 snapshots, got {}",
            snapshots.len()
        )));
    }
    if snapshots.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::InvalidArgument("snapshots must be time-ordered".into()));
    }
    let powers = snapshots.iter().map(|(_, f)| lq_norm_space(f, q).map(|n| n.powf(q))).collect::<Result<Vec<_>>>()?;
    let integral = compensated_sum(
        snapshots.windows(2).zip(powers.windows(2)).map(|(s, p)| 0.5 * (s[1].0 - s[0].0) * (p[0] + p[1])),
    );
    Ok(integral.powf(1.0 / q))
}

/// `Σ f h^N`.
pub fn total_mass(f: &Field) -> f64 {
    compensated_sum(f.values().iter().copied()) * f.grid().cell_volume()
}

pub fn min_value(f: &Field) -> f64 {
    f.values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// A field together with the cells that lie at least `margin` away from ∂Ω.
#[derive(Debug, Clone)]
pub struct Interior {
    field: Field,
    keep: Vec<bool>,
}

impl Interior {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_kept(&self, idx: usize) -> bool {
        self.keep[idx]
    }

    pub fn count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    /// `(cell, value)` for every surviving cell.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.field.values().iter().zip(&self.keep).enumerate().filter_map(|(i, (&v, &k))| k.then_some((i, v)))
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0_f64, |m, (_, v)| m.max(v.abs()))
    }
}

/// Masks out cells whose centre lies closer than `margin` to ∂Ω.
pub fn restrict_interior(f: &Field, margin: f64) -> Result<Interior> {
    let grid = *f.grid();
    let half = grid.extent()[..grid.dim()].iter().fold(f64::INFINITY, |m, &e| m.min(0.5 * e));
    if !(margin >= 0.0) || margin > half {
        return Err(Error::InvalidArgument(format!("margin {margin} must lie in [0, {half}]")));
    }
    let ext = grid.extent();
    let keep = (0..grid.len())
        .map(|i| {
            let c = grid.center(i);
            (0..grid.dim()).all(|a| c[a] >= margin && ext[a] - c[a] >= margin)
        })
        .collect();
    Ok(Interior { field: f.clone(), keep })
}

/// Writes a field as a snapshot text file: a `# t=… nx=… [ny=…] h=…` header
/// followed by one value per line with 17 significant digits.
pub fn write_snapshot(path: &Path, t: f64, f: &Field) -> Result<()> {
    fs::write(path, format_snapshot(t, f))?;
    Ok(())
}

pub fn format_snapshot(t: f64, f: &Field) -> String {
    let g = f.grid();
    let mut s = String::with_capacity(26 * g.len() + 64);
    let _ = write!(s, "# t={t:.16e} nx={}", g.nx());
    if g.dim() == 2 {
        let _ = write!(s, " ny={}", g.ny());
    }
    let _ = writeln!(s, " h={:.16e}", g.h());
    for v in f.values() {
        let _ = writeln!(s, "{v:.16e}");
    }
    s
}

/// Parses a snapshot file written by [`write_snapshot`].
pub fn read_snapshot(path: &Path) -> Result<(f64, Field)> {
    parse_snapshot(&fs::read_to_string(path)?)
}

pub fn parse_snapshot(text: &str) -> Result<(f64, Field)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .ok_or_else(|| Error::Snapshot("missing '#' header line".into()))?;
    let (mut t, mut nx, mut ny, mut h) = (None, None, None, None);
    for tok in header.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Snapshot(format!("bad header token '{tok}'")))?;
        let bad = || Error::Snapshot(format!("bad value in header token '{tok}'"));
        match k {
            "t" => t = Some(v.parse::<f64>().map_err(|_| bad())?),
            "nx" => nx = Some(v.parse::<usize>().map_err(|_| bad())?),
            "ny" => ny = Some(v.parse::<usize>().map_err(|_| bad())?),
            "h" => h = Some(v.parse::<f64>().map_err(|_| bad())?),
            _ => return Err(Error::Snapshot(format!("unknown header key '{k}'"))),
        }
    }
    let missing = |k: &str| Error::Snapshot(format!("header lacks '{k}'"));
    let (t, nx, h) = (t.ok_or_else(|| missing("t"))?, nx.ok_or_else(|| missing("nx"))?, h.ok_or_else(|| missing("h"))?);
    let grid = match ny {
        None => Grid::new_1d(nx as f64 * h, nx)?,
        Some(ny) => Grid::new_2d(nx as f64 * h, ny as f64 * h, nx, ny)?,
    };
    let values = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>().map_err(|e| Error::Snapshot(format!("bad value '{l}': {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((t, Field::from_values(grid, values)?))
}
