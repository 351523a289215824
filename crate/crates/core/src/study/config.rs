//! Flat `key = value` configuration files.
//!
//! Lines are `key = value`; `#` starts a comment; lists are comma separated.
//! Every key is validated and unknown keys are rejected. [`StudyConfig::emit`]
//! writes every field explicitly, so emitting and parsing again reproduces the
//! configuration exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::grid::{Field, Grid, Species, SpeciesPair};
use crate::integrator::SolverSettings;
use crate::kernel::{KernelFamily, KernelProfile, DEFAULT_MIN_CELLS_PER_RADIUS};
use crate::model::ModelParams;

use super::consistency::TestFunction;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config error at line {l}, key `{}`: {}", self.key, self.message),
            None => write!(f, "config error, key `{}`: {}", self.key, self.message),
        }
    }
}

impl ConfigError {
    fn new(line: Option<usize>, key: &str, message: impl Into<String>) -> Self {
        Self { line, key: key.to_string(), message: message.into() }
    }
}

type CfgResult<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub radius: f64,
    pub min_cells_per_radius: f64,
    pub quad_resolution: usize,
}

impl KernelSpec {
    pub fn profile(&self, dim: usize) -> crate::Result<KernelProfile> {
        KernelProfile::new(self.family, self.radius, dim)
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            family: KernelFamily::PolynomialBump,
            radius: 1.0,
            min_cells_per_radius: DEFAULT_MIN_CELLS_PER_RADIUS,
            quad_resolution: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dimension: usize,
    pub extent: [f64; 2],
    pub cells: [usize; 2],
}

impl GridSpec {
    pub fn build(&self) -> crate::Result<Grid> {
        Grid::new(self.dimension, self.extent, self.cells)
    }
}

/// Gaussian bumps `Σ A_k exp(−|x − x_k|² / w_k²)` added to a background level.
#[derive(Debug, Clone, PartialEq)]
pub struct Bumps {
    pub background: f64,
    pub amplitudes: Vec<f64>,
    pub centers_x: Vec<f64>,
    /// Ignored in 1D.
    pub centers_y: Vec<f64>,
    pub widths: Vec<f64>,
}

impl Bumps {
    fn eval(&self, x: [f64; 2], dim: usize) -> f64 {
        let mut v = self.background;
        for k in 0..self.amplitudes.len() {
            let dx = x[0] - self.centers_x[k];
            let dy = if dim == 2 { x[1] - self.centers_y[k] } else { 0.0 };
            let w = self.widths[k];
            v += self.amplitudes[k] * (-(dx * dx + dy * dy) / (w * w)).exp();
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Constant([f64; 2]),
    Gaussian([Bumps; 2]),
    /// `mean_i + amplitude_i Π_d cos(mode π x_d / L_d)`.
    Cosine {
        mean: [f64; 2],
        amplitude: [f64; 2],
        mode: u32,
    },
}

impl InitialSpec {
    pub fn sample(&self, grid: &Grid) -> crate::Result<SpeciesPair> {
        let dim = grid.dim();
        let ext = grid.extent();
        let field = |s: usize| -> Field {
            match self {
                Self::Constant(c) => Field::constant(*grid, c[s]),
                Self::Gaussian(b) => Field::from_fn(*grid, |x| b[s].eval(x, dim)),
                Self::Cosine { mean, amplitude, mode } => Field::from_fn(*grid, |x| {
                    let k = *mode as f64 * std::f64::consts::PI;
                    let mut c = (k * x[0] / ext[0]).cos();
                    if dim == 2 {
                        c *= (k * x[1] / ext[1]).cos();
                    }
                    mean[s] + amplitude[s] * c
                }),
            }
        };
        SpeciesPair::new(field(0), field(1))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSpec {
    pub species: Species,
    pub lambda: f64,
    pub picard_tol: f64,
    pub max_iters: usize,
    pub subintervals: usize,
    pub slab_safety: f64,
    /// `ψ(x) = −amplitude · exp(−|x − centre|² / width²)`, centred in Ω.
    pub psi_amplitude: f64,
    pub psi_width: f64,
}

impl Default for DualSpec {
    fn default() -> Self {
        Self {
            species: Species::U1,
            lambda: 1.0,
            picard_tol: 1e-12,
            max_iters: 200,
            subintervals: 32,
            slab_safety: 0.5,
            psi_amplitude: 1.0,
            psi_width: 0.1,
        }
    }
}

impl DualSpec {
    pub fn picard(&self) -> crate::dual::PicardSettings {
        crate::dual::PicardSettings {
            tol: self.picard_tol,
            max_iters: self.max_iters,
            slab_safety: self.slab_safety,
            subintervals: self.subintervals,
        }
    }

    pub fn psi(&self, grid: &Grid) -> Field {
        let ext = grid.extent();
        let dim = grid.dim();
        let (a, w) = (self.psi_amplitude, self.psi_width);
        Field::from_fn(*grid, |x| {
            let dx = x[0] - 0.5 * ext[0];
            let dy = if dim == 2 { x[1] - 0.5 * ext[1] } else { 0.0 };
            -a * (-(dx * dx + dy * dy) / (w * w)).exp()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub kernel: KernelSpec,
    pub grid: GridSpec,
    pub model: ModelParams,
    pub initial: InitialSpec,
    pub solver: SolverSettings,
    /// Number of uniformly spaced snapshot times in `[0, T]`.
    pub snapshots: usize,
    pub n_list: Vec<u32>,
    /// Scale used by single nonlocal runs.
    pub n: u32,
    pub q: f64,
    pub consistency_function: TestFunction,
    pub lemma4_p: f64,
    pub dual: DualSpec,
}

/// Raw entries keyed by name, with the line they came from.
struct Entries {
    map: BTreeMap<String, (usize, String)>,
    lines: BTreeMap<String, usize>,
}

impl Entries {
    fn parse(text: &str) -> CfgResult<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::new(Some(line), content, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ConfigError::new(Some(line), "", "empty key"));
            }
            if map.insert(k.to_string(), (line, v.to_string())).is_some() {
                return Err(ConfigError::new(Some(line), k, "duplicate key"));
            }
        }
        let lines = map.iter().map(|(k, (l, _))| (k.clone(), *l)).collect();
        Ok(Self { map, lines })
    }

    /// Fills in the source line for errors raised after a key was consumed.
    fn locate(&self, mut err: ConfigError) -> ConfigError {
        if err.line.is_none() {
            err.line = self.lines.get(&err.key).copied();
        }
        err
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn parse_value<T: FromStr>(line: usize, key: &str, v: &str) -> CfgResult<T>
    where
        T::Err: fmt::Display,
    {
        v.parse::<T>().map_err(|e| ConfigError::new(Some(line), key, format!("cannot parse `{v}`: {e}")))
    }

    fn required<T: FromStr>(&mut self, key: &str) -> CfgResult<T>
    where
        T::Err: fmt::Display,
    {
        let (line, v) = self.take(key).ok_or_else(|| ConfigError::new(None, key, "missing required key"))?;
        Self::parse_value(line, key, &v)
    }

    fn optional<T: FromStr>(&mut self, key: &str, default: T) -> CfgResult<T>
    where
        T::Err: fmt::Display,
    {
        match self.take(key) {
            Some((line, v)) => Self::parse_value(line, key, &v),
            None => Ok(default),
        }
    }

    fn list<T: FromStr>(&mut self, key: &str, default: Option<Vec<T>>) -> CfgResult<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        match self.take(key) {
            Some((_, v)) if v.is_empty() => Ok(Vec::new()),
            Some((line, v)) => v.split(',').map(|s| Self::parse_value(line, key, s.trim())).collect(),
            None => default.ok_or_else(|| ConfigError::new(None, key, "missing required key")),
        }
    }

    fn finish(&mut self) -> CfgResult<()> {
        match std::mem::take(&mut self.map).into_iter().next() {
            Some((k, (line, _))) => Err(ConfigError::new(Some(line), &k, "unknown key")),
            None => Ok(()),
        }
    }
}

fn check(cond: bool, key: &str, message: impl Into<String>) -> CfgResult<()> {
    if cond {
        Ok(())
    } else {
        Err(ConfigError::new(None, key, message))
    }
}

fn nonneg(v: f64, key: &str) -> CfgResult<()> {
    check(v.is_finite() && v >= 0.0, key, format!("must be finite and nonnegative, got {v}"))
}

fn positive(v: f64, key: &str) -> CfgResult<()> {
    check(v.is_finite() && v > 0.0, key, format!("must be finite and positive, got {v}"))
}

fn fmt_list<T: fmt::Debug>(v: &[T]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

impl StudyConfig {
    pub fn from_file(path: &Path) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::parse(&text)?)
    }

    pub fn parse(text: &str) -> CfgResult<Self> {
        let mut e = Entries::parse(text)?;
        Self::parse_entries(&mut e).map_err(|err| e.locate(err))
    }

    fn parse_entries(e: &mut Entries) -> CfgResult<Self> {
        let dimension: usize = e.optional("grid.dimension", 1)?;
        check(dimension == 1 || dimension == 2, "grid.dimension", "must be 1 or 2")?;
        let kernel_dim: usize = e.optional("kernel.dimension", dimension)?;
        check(kernel_dim == dimension, "kernel.dimension", "must match grid.dimension")?;
        let dk = KernelSpec::default();
        let kernel = KernelSpec {
            family: e.optional("kernel.family", dk.family)?,
            radius: e.optional("kernel.radius", dk.radius)?,
            min_cells_per_radius: e.optional("kernel.min_cells_per_radius", dk.min_cells_per_radius)?,
            quad_resolution: e.optional("kernel.quad_resolution", dk.quad_resolution)?,
        };
        positive(kernel.radius, "kernel.radius")?;
        positive(kernel.min_cells_per_radius, "kernel.min_cells_per_radius")?;
        check(kernel.quad_resolution >= 64, "kernel.quad_resolution", "must be at least 64")?;

        let grid = if dimension == 1 {
            GridSpec {
                dimension,
                extent: [e.optional("grid.extent_x", 1.0)?, 0.0],
                cells: [e.required("grid.cells_x")?, 1],
            }
        } else {
            GridSpec {
                dimension,
                extent: [e.optional("grid.extent_x", 1.0)?, e.optional("grid.extent_y", 1.0)?],
                cells: [e.required("grid.cells_x")?, e.required("grid.cells_y")?],
            }
        };
        grid.build().map_err(|err| ConfigError::new(None, "grid", err.to_string()))?;

        let model = ModelParams {
            c: [e.required("model.c1")?, e.required("model.c2")?],
            a: [e.required("model.a1")?, e.required("model.a2")?],
            alpha: [e.optional("model.alpha1", 0.0)?, e.optional("model.alpha2", 0.0)?],
            beta: [
                [e.optional("model.beta11", 0.0)?, e.optional("model.beta12", 0.0)?],
                [e.optional("model.beta21", 0.0)?, e.optional("model.beta22", 0.0)?],
            ],
            t_final: e.required("model.t_final")?,
        };
        for (k, v) in [
            ("model.c1", model.c[0]),
            ("model.c2", model.c[1]),
            ("model.a1", model.a[0]),
            ("model.a2", model.a[1]),
            ("model.alpha1", model.alpha[0]),
            ("model.alpha2", model.alpha[1]),
            ("model.beta11", model.beta[0][0]),
            ("model.beta12", model.beta[0][1]),
            ("model.beta21", model.beta[1][0]),
            ("model.beta22", model.beta[1][1]),
        ] {
            nonneg(v, k)?;
        }
        positive(model.t_final, "model.t_final")?;

        let initial = Self::parse_initial(e, dimension)?;

        let ds = SolverSettings::default();
        let dt_max: Option<f64> = match e.take("solver.dt_max") {
            Some((_, v)) if v == "none" => None,
            Some((line, v)) => Some(Entries::parse_value(line, "solver.dt_max", &v)?),
            None => None,
        };
        let solver = SolverSettings {
            dt_safety: e.optional("solver.dt_safety", ds.dt_safety)?,
            positivity_tol: e.optional("solver.positivity_tol", ds.positivity_tol)?,
            diag_stride: e.optional("solver.diag_stride", ds.diag_stride)?,
            dt_max,
        };
        solver.validate().map_err(|err| ConfigError::new(None, "solver", err.to_string()))?;
        let snapshots: usize = e.optional("solver.snapshots", 33)?;
        check(snapshots >= 2, "solver.snapshots", "need at least 2 snapshot times")?;

        let n_list: Vec<u32> = e.list("study.n_list", Some(vec![4, 8, 16, 32]))?;
        check(!n_list.is_empty(), "study.n_list", "must not be empty")?;
        check(n_list.iter().all(|&n| n > 0), "study.n_list", "entries must be positive")?;
        check(n_list.windows(2).all(|w| w[1] > w[0]), "study.n_list", "must be strictly increasing")?;
        let n: u32 = e.optional("study.n", 8)?;
        check(n > 0, "study.n", "must be positive")?;
        let q: f64 = e.optional("study.q", 2.0)?;
        check((1.0..3.0).contains(&q), "study.q", format!("must lie in [1, 3), got {q}"))?;

        let consistency_function = e.optional("consistency.function", TestFunction::Cosine)?;
        let lemma4_p: f64 = e.optional("lemma4.p", 3.0)?;
        check(lemma4_p >= 1.0 && lemma4_p.is_finite(), "lemma4.p", "must be finite and >= 1")?;

        let dd = DualSpec::default();
        let species: usize = e.optional("dual.species", 1)?;
        let dual = DualSpec {
            species: Species::from_number(species)
                .map_err(|err| ConfigError::new(None, "dual.species", err.to_string()))?,
            lambda: e.optional("dual.lambda", dd.lambda)?,
            picard_tol: e.optional("dual.picard_tol", dd.picard_tol)?,
            max_iters: e.optional("dual.max_iters", dd.max_iters)?,
            subintervals: e.optional("dual.subintervals", dd.subintervals)?,
            slab_safety: e.optional("dual.slab_safety", dd.slab_safety)?,
            psi_amplitude: e.optional("dual.psi_amplitude", dd.psi_amplitude)?,
            psi_width: e.optional("dual.psi_width", dd.psi_width)?,
        };
        nonneg(dual.lambda, "dual.lambda")?;
        positive(dual.picard_tol, "dual.picard_tol")?;
        check(dual.max_iters > 0, "dual.max_iters", "must be positive")?;
        check(dual.subintervals > 0, "dual.subintervals", "must be positive")?;
        check(dual.slab_safety > 0.0 && dual.slab_safety < 1.0, "dual.slab_safety", "must lie in (0, 1)")?;
        nonneg(dual.psi_amplitude, "dual.psi_amplitude")?;
        positive(dual.psi_width, "dual.psi_width")?;

        e.finish()?;
        let cfg = Self {
            kernel,
            grid,
            model,
            initial,
            solver,
            snapshots,
            n_list,
            n,
            q,
            consistency_function,
            lemma4_p,
            dual,
        };
        cfg.check_resolution()?;
        Ok(cfg)
    }

    fn parse_initial(e: &mut Entries, dim: usize) -> CfgResult<InitialSpec> {
        let kind: String = e.required("initial.kind")?;
        let spec = match kind.as_str() {
            "constant" => InitialSpec::Constant([e.required("initial.u1")?, e.required("initial.u2")?]),
            "gaussian" => {
                let mut bumps = Vec::with_capacity(2);
                for s in 1..=2 {
                    let pre = format!("initial.u{s}");
                    let amplitudes: Vec<f64> = e.list(&format!("{pre}.amplitudes"), None)?;
                    let centers_x: Vec<f64> = e.list(&format!("{pre}.centers_x"), None)?;
                    let centers_y: Vec<f64> =
                        if dim == 2 { e.list(&format!("{pre}.centers_y"), None)? } else { Vec::new() };
                    let widths: Vec<f64> = e.list(&format!("{pre}.widths"), None)?;
                    let background: f64 = e.optional(&format!("{pre}.background"), 0.0)?;
                    let m = amplitudes.len();
                    let key = format!("{pre}.amplitudes");
                    check(
                        centers_x.len() == m && widths.len() == m && (dim == 1 || centers_y.len() == m),
                        &key,
                        "amplitudes, centers and widths must have equal length",
                    )?;
                    nonneg(background, &format!("{pre}.background"))?;
                    for &a in &amplitudes {
                        nonneg(a, &key)?;
                    }
                    for &w in &widths {
                        positive(w, &format!("{pre}.widths"))?;
                    }
                    for &c in centers_x.iter().chain(&centers_y) {
                        check(c.is_finite(), &format!("{pre}.centers_x"), "centers must be finite")?;
                    }
                    bumps.push(Bumps { background, amplitudes, centers_x, centers_y, widths });
                }
                let b2 = bumps.pop().expect("two species");
                let b1 = bumps.pop().expect("two species");
                InitialSpec::Gaussian([b1, b2])
            }
            "cosine" => {
                let mean: [f64; 2] = [e.required("initial.mean1")?, e.required("initial.mean2")?];
                let amplitude: [f64; 2] = [e.required("initial.amplitude1")?, e.required("initial.amplitude2")?];
                let mode: u32 = e.optional("initial.mode", 1)?;
                for s in 0..2 {
                    nonneg(amplitude[s], &format!("initial.amplitude{}", s + 1))?;
                    check(
                        mean[s].is_finite() && mean[s] >= amplitude[s],
                        &format!("initial.mean{}", s + 1),
                        "mean must be at least the amplitude so the datum stays nonnegative",
                    )?;
                }
                InitialSpec::Cosine { mean, amplitude, mode }
            }
            other => {
                return Err(ConfigError::new(
                    None,
                    "initial.kind",
                    format!("unknown kind `{other}` (expected constant, gaussian or cosine)"),
                ))
            }
        };
        if let InitialSpec::Constant(c) = &spec {
            nonneg(c[0], "initial.u1")?;
            nonneg(c[1], "initial.u2")?;
        }
        Ok(spec)
    }

    /// Every scale in use must resolve the kernel support on the grid.
    fn check_resolution(&self) -> CfgResult<()> {
        let h = self.grid.extent[0] / self.grid.cells[0] as f64;
        for (key, n) in self.n_list.iter().map(|&n| ("study.n_list", n)).chain([("study.n", self.n)]) {
            let cells = self.kernel.radius / (n as f64 * h);
            check(
                cells >= self.kernel.min_cells_per_radius,
                key,
                format!(
                    "n = {n} leaves {cells:.3} cells per kernel radius, below kernel.min_cells_per_radius = {}",
                    self.kernel.min_cells_per_radius
                ),
            )?;
        }
        Ok(())
    }

    pub fn build_grid(&self) -> crate::Result<Grid> {
        self.grid.build()
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        crate::integrator::uniform_times(self.model.t_final, self.snapshots)
    }

    /// Serialises every field; floats use the shortest round-trip form.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        let k = &self.kernel;
        put("kernel.family", k.family.to_string());
        put("kernel.radius", format!("{:?}", k.radius));
        put("kernel.dimension", self.grid.dimension.to_string());
        put("kernel.min_cells_per_radius", format!("{:?}", k.min_cells_per_radius));
        put("kernel.quad_resolution", k.quad_resolution.to_string());

        let g = &self.grid;
        put("grid.dimension", g.dimension.to_string());
        put("grid.extent_x", format!("{:?}", g.extent[0]));
        put("grid.cells_x", g.cells[0].to_string());
        if g.dimension == 2 {
            put("grid.extent_y", format!("{:?}", g.extent[1]));
            put("grid.cells_y", g.cells[1].to_string());
        }

        let m = &self.model;
        put("model.c1", format!("{:?}", m.c[0]));
        put("model.c2", format!("{:?}", m.c[1]));
        put("model.a1", format!("{:?}", m.a[0]));
        put("model.a2", format!("{:?}", m.a[1]));
        put("model.alpha1", format!("{:?}", m.alpha[0]));
        put("model.alpha2", format!("{:?}", m.alpha[1]));
        put("model.beta11", format!("{:?}", m.beta[0][0]));
        put("model.beta12", format!("{:?}", m.beta[0][1]));
        put("model.beta21", format!("{:?}", m.beta[1][0]));
        put("model.beta22", format!("{:?}", m.beta[1][1]));
        put("model.t_final", format!("{:?}", m.t_final));

        match &self.initial {
            InitialSpec::Constant(c) => {
                put("initial.kind", "constant".into());
                put("initial.u1", format!("{:?}", c[0]));
                put("initial.u2", format!("{:?}", c[1]));
            }
            InitialSpec::Gaussian(bumps) => {
                put("initial.kind", "gaussian".into());
                for (s, b) in bumps.iter().enumerate() {
                    let pre = format!("initial.u{}", s + 1);
                    put(&format!("{pre}.background"), format!("{:?}", b.background));
                    put(&format!("{pre}.amplitudes"), fmt_list(&b.amplitudes));
                    put(&format!("{pre}.centers_x"), fmt_list(&b.centers_x));
                    if g.dimension == 2 {
                        put(&format!("{pre}.centers_y"), fmt_list(&b.centers_y));
                    }
                    put(&format!("{pre}.widths"), fmt_list(&b.widths));
                }
            }
            InitialSpec::Cosine { mean, amplitude, mode } => {
                put("initial.kind", "cosine".into());
                put("initial.mean1", format!("{:?}", mean[0]));
                put("initial.mean2", format!("{:?}", mean[1]));
                put("initial.amplitude1", format!("{:?}", amplitude[0]));
                put("initial.amplitude2", format!("{:?}", amplitude[1]));
                put("initial.mode", mode.to_string());
            }
        }

        let s = &self.solver;
        put("solver.dt_safety", format!("{:?}", s.dt_safety));
        put("solver.positivity_tol", format!("{:?}", s.positivity_tol));
        put("solver.diag_stride", s.diag_stride.to_string());
        put("solver.dt_max", s.dt_max.map_or("none".into(), |v| format!("{v:?}")));
        put("solver.snapshots", self.snapshots.to_string());

        put("study.n_list", fmt_list(&self.n_list));
        put("study.n", self.n.to_string());
        put("study.q", format!("{:?}", self.q));
        put("consistency.function", self.consistency_function.to_string());
        put("lemma4.p", format!("{:?}", self.lemma4_p));

        let d = &self.dual;
        put("dual.species", d.species.number().to_string());
        put("dual.lambda", format!("{:?}", d.lambda));
        put("dual.picard_tol", format!("{:?}", d.picard_tol));
        put("dual.max_iters", d.max_iters.to_string());
        put("dual.subintervals", d.subintervals.to_string());
        put("dual.slab_safety", format!("{:?}", d.slab_safety));
        put("dual.psi_amplitude", format!("{:?}", d.psi_amplitude));
        put("dual.psi_width", format!("{:?}", d.psi_width));
        out
    }
}
