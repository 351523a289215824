//! Numerical laboratory for the Shigesada–Kawasaki–Teramoto (SKT) cross-diffusion
//! system with nonlocal diffusion.
//!
//! The nonlocal model replaces the Laplacian by the integral operator
//! `Δⁿφ(x) = ∫_Ω J_n(x−y)(φ(y)−φ(x)) dy` with a rescaled, compactly supported
//! kernel `J_n(x) = C₁ n^{2+N} J(nx)`. As `n` grows the nonlocal solutions
//! approach the solution of the local SKT system with zero-flux boundary
//! conditions. This crate provides both solvers, the linear dual problem used
//! for duality estimates, and the diagnostics that track the convergence.
//!
//! Module map:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`kernel`] | kernel profiles, second-moment constant `C₁`, discrete kernels |
//! | [`grid`] | box grids, cell-centred fields, norms, snapshot files |
//! | [`nonlocal_op`] | `Δⁿ`, its dissipation form, the bounded-operator audit |
//! | [`model`] | SKT nonlinearities, reactions, entropy |
//! | [`nonlocal_solver`] | explicit integrator for the nonlocal system |
//! | [`local_solver`] | finite-difference reference for the local system |
//! | [`dual`] | Picard solver for the linear nonlocal dual problem |
//! | [`study`] | configuration, experiments and file output |

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dual;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod local_solver;
pub mod model;
pub mod nonlocal_op;
pub mod nonlocal_solver;
pub mod numerics;
pub mod study;

mod integrator;

pub use error::{Error, Result};
pub use grid::{Field, Grid, Species, SpeciesPair};
pub use integrator::{uniform_times, DiagnosticsRecord, SolverSettings, Trajectory};
pub use kernel::{DiscreteKernel, KernelFamily, KernelKind, KernelProfile, MomentNormalizer};
pub use model::ModelParams;
pub use nonlocal_op::NonlocalOperator;
