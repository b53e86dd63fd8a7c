use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site {site} out of range for a register of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("need at least {min} sites, got {n_sites}")]
    TooFewSites { min: usize, n_sites: usize },

    #[error("probability table is not normalized (sum {sum}) or has entries outside [0, 1]")]
    UnnormalizedTable { sum: f64 },

    #[error("degenerate rotation angles: prefactor {prefactor:.3e} below guard")]
    DegenerateAngles { prefactor: f64 },

    #[error("no shots recorded")]
    EmptyCounts,

    #[error("invalid sampling configuration: {0}")]
    InvalidSampling(String),

    #[error("atom distance must be positive, got {0}")]
    InvalidDistance(f64),

    #[error("invalid distance grid: {0}")]
    InvalidGrid(String),

    #[error("cannot identify the |gg>-connected eigenstate (overlap {overlap:.3})")]
    Adiabaticity { overlap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
