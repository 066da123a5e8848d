use thiserror::Error;

/// Errors raised by sector construction, operator algebra and quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sector spec: {0}")]
    InvalidSpec(String),
    #[error("mode count mismatch: expected {expected}, found {found}")]
    ModeMismatch { expected: usize, found: usize },
    #[error("mode index {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("sector mismatch: {0}")]
    SectorMismatch(String),
    #[error("operator is not Hermitian (max |H - H^dagger| = {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("dimension {dim} exceeds the dense limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("invalid quadrature order: {0}")]
    InvalidOrder(String),
    #[error(
        "grid exactness insufficient: need radial degree {need_degree} and phase frequency \
         {need_frequency}, grid certifies {have_degree} and {have_frequency}"
    )]
    ExactnessInsufficient {
        need_degree: usize,
        need_frequency: usize,
        have_degree: usize,
        have_frequency: usize,
    },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
