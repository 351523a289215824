//! Radial, compactly supported kernel profiles and their rescaled discrete
//! stencils.
//!
//! A profile `J` is normalised to unit mass. The rescaled kernel is
//! `J_n(x) = C₁ n^{2+N} J(nx)` with `C₁⁻¹ = ½ ∫ J(x) x_N² dx`, and the Dirac
//! approximation is `J̃_n(x) = n^N J(nx) = J_n(x) / (C₁ n²)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numerics::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// Indicator of the ball `B_r`.
    Uniform,
    /// `1 − |x|/r`.
    Tent,
    /// `(1 − |x|²/r²)²`.
    PolynomialBump,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 3] = [Self::Uniform, Self::Tent, Self::PolynomialBump];

    /// Unnormalised radial shape on `s = |x|/r ∈ [0, 1]`.
    fn shape(self, s: f64) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::Tent => 1.0 - s,
            Self::PolynomialBump => {
                let q = 1.0 - s * s;
                q * q
            }
        }
    }

    /// `∫_{B_1} shape(|x|) dx` in dimension `dim`.
    fn unit_mass(self, dim: usize) -> f64 {
        match (self, dim) {
            (Self::Uniform, 1) => 2.0,
            (Self::Tent, 1) => 1.0,
            (Self::PolynomialBump, 1) => 16.0 / 15.0,
            (Self::Uniform, _) => PI,
            (Self::Tent, _) => PI / 3.0,
            (Self::PolynomialBump, _) => PI / 3.0,
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Tent => "tent",
            Self::PolynomialBump => "polynomial_bump",
        })
    }
}

impl FromStr for KernelFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "tent" => Ok(Self::Tent),
            "polynomial_bump" => Ok(Self::PolynomialBump),
            _ => Err(format!("unknown kernel family '{s}' (expected uniform, tent or polynomial_bump)")),
        }
    }
}

/// A unit-mass radial kernel `J` supported on `B_r(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelProfile {
    family: KernelFamily,
    radius: f64,
    dim: usize,
    amplitude: f64,
}

impl KernelProfile {
    pub fn new(family: KernelFamily, radius: f64, dim: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::NonPositiveRadius(radius));
        }
        let amplitude = 1.0 / (family.unit_mass(dim) * radius.powi(dim as i32));
        Ok(Self { family, radius, dim, amplitude })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `J` evaluated at distance `dist` from the origin.
    pub fn value_at_distance(&self, dist: f64) -> f64 {
        let s = dist.abs() / self.radius;
        if s > 1.0 {
            0.0
        } else {
            self.amplitude * self.family.shape(s)
        }
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let d = if self.dim == 1 { x[0].abs() } else { x[0].hypot(x[1]) };
        self.value_at_distance(d)
    }
}

/// The second-moment constant `C₁` together with a quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentNormalizer {
    pub c1: f64,
    pub quadrature_error_estimate: f64,
}

/// Midpoint rule for `∫₀^r g(ρ) dρ` with `m` cells.
fn radial_midpoint(r: f64, m: usize, g: impl Fn(f64) -> f64) -> f64 {
    let d = r / m as f64;
    d * compensated_sum((0..m).map(|k| g((k as f64 + 0.5) * d)))
}

/// Computes `C₁ = [½ ∫ J(x) x_N² dx]⁻¹` by radial midpoint quadrature.
///
/// The moment reduces to a radial integral (`2∫₀^r J ρ² dρ` in 1D,
/// `π∫₀^r J ρ³ dρ` in 2D). It is evaluated at `m` and `2m` cells and
/// Richardson-extrapolated; the gap between the extrapolated and the fine
/// value is reported as the error estimate.
pub fn compute_c1(profile: &KernelProfile, quad_resolution: usize) -> MomentNormalizer {
    let m = quad_resolution.max(64);
    let r = profile.radius();
    let moment = |cells: usize| match profile.dim() {
        1 => 2.0 * radial_midpoint(r, cells, |p| profile.value_at_distance(p) * p * p),
        _ => PI * radial_midpoint(r, cells, |p| profile.value_at_distance(p) * p * p * p),
    };
    let coarse = moment(m);
    let fine = moment(2 * m);
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    let c1 = 2.0 / extrapolated;
    let c1_fine = 2.0 / fine;
    MomentNormalizer { c1, quadrature_error_estimate: (c1 - c1_fine).abs() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `J_n`, carrying the `C₁ n²` amplification.
    Rescaled,
    /// `J̃_n`, unit mass.
    DeltaApprox,
}

/// One row of the stencil: offsets `(kx, ky)` for `kx ∈ [-half_width, half_width]`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct StencilRow {
    pub ky: i64,
    pub half_width: i64,
    /// Weights indexed by `kx + half_width`.
    pub weights: Vec<f64>,
}

/// Quadrature weights of `J_n` or `J̃_n` on the integer grid offsets inside the
/// support ball of radius `r/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel {
    scale_n: u32,
    kind: KernelKind,
    c1: f64,
    dim: usize,
    h: f64,
    rows: Vec<StencilRow>,
}

pub const DEFAULT_MIN_CELLS_PER_RADIUS: f64 = 8.0;

/// Samples the rescaled kernel at every grid offset `k` with `|k|·h ≤ r/n`.
///
/// Delta-approximation weights are `h^N n^N J(n k h)`, renormalised to sum to
/// exactly one; rescaled weights are those multiplied by `C₁ n²`.
pub fn discretize(
    profile: &KernelProfile,
    normalizer: &MomentNormalizer,
    n: u32,
    grid: &Grid,
    min_cells_per_radius: f64,
    kind: KernelKind,
) -> Result<DiscreteKernel> {
    if grid.dim() != profile.dim() {
        return Err(Error::InvalidArgument(format!(
            "kernel dimension {} does not match grid dimension {}",
            profile.dim(),
            grid.dim()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("scale n must be positive".into()));
    }
    let nf = n as f64;
    let h = grid.h();
    let cells_per_radius = profile.radius() / (nf * h);
    if cells_per_radius < min_cells_per_radius {
        return Err(Error::UnderresolvedKernel { cells_per_radius, min: min_cells_per_radius });
    }
    // Offsets with |k|² ≤ R²; the slack keeps lattice points that sit on the
    // support sphere in exact arithmetic.
    let r2 = cells_per_radius * cells_per_radius * (1.0 + 1e-12);
    let kmax = (cells_per_radius * (1.0 + 1e-12)).floor() as i64;
    let ky_range = if profile.dim() == 1 { 0..=0 } else { -kmax..=kmax };

    let mut rows = Vec::new();
    for ky in ky_range {
        let rem = r2 - (ky * ky) as f64;
        if rem < 0.0 {
            continue;
        }
        let half_width = (rem.sqrt().floor() as i64).min(kmax);
        let weights = (-half_width..=half_width)
            .map(|kx| {
                let d = h * ((kx * kx + ky * ky) as f64).sqrt();
                profile.value_at_distance(nf * d)
            })
            .collect();
        rows.push(StencilRow { ky, half_width, weights });
    }

    // The common factor h^N n^N cancels in the renormalisation.
    let total = compensated_sum(rows.iter().flat_map(|r| r.weights.iter().copied()));
    if !(total > 0.0) {
        return Err(Error::Degenerate("kernel has no mass on the grid".into()));
    }
    let amp = match kind {
        KernelKind::DeltaApprox => 1.0,
        KernelKind::Rescaled => normalizer.c1 * (nf * nf),
    };
    for row in &mut rows {
        for w in &mut row.weights {
            *w = *w / total * amp;
        }
    }
    Ok(DiscreteKernel { scale_n: n, kind, c1: normalizer.c1, dim: profile.dim(), h, rows })
}

impl DiscreteKernel {
    pub fn scale_n(&self) -> u32 {
        self.scale_n
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Spacing of the grid the kernel was built on.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub(crate) fn rows(&self) -> &[StencilRow] {
        &self.rows
    }

    /// Offsets `(kx, ky)` in row-major order.
    pub fn offsets(&self) -> Vec<[i64; 2]> {
        self.iter().map(|(k, _)| k).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.iter().map(|(_, w)| w).collect()
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.weights.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = ([i64; 2], f64)> + '_ {
        self.rows
            .iter()
            .flat_map(|r| r.weights.iter().enumerate().map(move |(j, &w)| ([j as i64 - r.half_width, r.ky], w)))
    }

    pub fn weight(&self, k: [i64; 2]) -> Option<f64> {
        let row = self.rows.iter().find(|r| r.ky == k[1])?;
        if k[0].abs() > row.half_width {
            return None;
        }
        Some(row.weights[(k[0] + row.half_width) as usize])
    }

    /// Sum of all weights; equals `C₁ n²` for a rescaled kernel and 1 otherwise.
    pub fn total_weight(&self) -> f64 {
        compensated_sum(self.iter().map(|(_, w)| w))
    }

    /// Largest offset index along either axis.
    pub fn reach(&self) -> i64 {
        self.rows.iter().map(|r| r.half_width.max(r.ky.abs())).max().unwrap_or(0)
    }

    /// Same stencil converted to the other kind.
    pub fn with_kind(&self, kind: KernelKind) -> DiscreteKernel {
        let nf = self.scale_n as f64;
        let amp = self.c1 * (nf * nf);
        let factor = match (self.kind, kind) {
            (a, b) if a == b => 1.0,
            (KernelKind::DeltaApprox, KernelKind::Rescaled) => amp,
            _ => 1.0 / amp,
        };
        let mut out = self.clone();
        out.kind = kind;
        for row in &mut out.rows {
            for w in &mut row.weights {
                *w *= factor;
            }
        }
        out
    }
}
