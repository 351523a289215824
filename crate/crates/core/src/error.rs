use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 1 or 2)")]
    UnsupportedDimension(usize),

    #[error("support radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("kernel under-resolved: {cells_per_radius:.3} cells per support radius, need at least {min}")]
    UnderresolvedKernel { cells_per_radius: f64, min: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field lives on a different grid than the operator")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("negative density {value:e} at cell {cell}")]
    NegativeInput { cell: usize, value: f64 },

    #[error("field does not vanish near the boundary (|value| = {value:e} at cell {cell})")]
    NotCompactlySupported { cell: usize, value: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("positivity breach at t = {t}: species {species} reached {min:e}")]
    PositivityBreach { t: f64, species: usize, min: f64 },

    #[error("non-finite value produced at t = {t}")]
    NonFinite { t: f64 },

    #[error("Picard iteration is not contracting on slab {slab} (increment ratio {ratio})")]
    NoContraction { slab: usize, ratio: f64 },

    #[error("Picard iteration did not reach tolerance on slab {slab} after {iters} iterations")]
    MaxIters { slab: usize, iters: usize },

    #[error("run with n = {n} failed: {source}")]
    StudyRun {
        n: u32,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Config(#[from] crate::study::config::ConfigError),

    #[error("malformed snapshot file: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures raised while integrating or iterating a solver.
    pub fn is_solver_error(&self) -> bool {
        match self {
            Error::PositivityBreach { .. }
            | Error::NonFinite { .. }
            | Error::NoContraction { .. }
            | Error::MaxIters { .. } => true,
            Error::StudyRun { source, .. } => source.is_solver_error(),
            _ => false,
        }
    }
}
