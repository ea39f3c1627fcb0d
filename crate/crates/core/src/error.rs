use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular Green's function evaluation: {0}")]
    Singularity(String),

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("Cholesky decomposition failed at pivot {pivot}")]
    NotPositiveDefinite { pivot: usize },

    #[error("singular system at pivot {pivot} ({context})")]
    Singular { pivot: usize, context: String },

    #[error("multiple-scattering system is resonant (condition estimate {condition:e})")]
    Resonance { condition: f64 },

    #[error("forward solve is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("could not place {placed} of {requested} scatterers after {attempts} attempts")]
    Placement {
        requested: usize,
        placed: usize,
        attempts: usize,
    },

    #[error("non-finite matrix entry at transmitter {tx}, receiver {rx}, cell {cell}")]
    Assembly { tx: usize, rx: usize, cell: usize },

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("degenerate signal: cannot set a finite SNR on an all-zero vector")]
    DegenerateSignal,

    #[error("undefined metric: reference vector is zero")]
    UndefinedMetric,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
