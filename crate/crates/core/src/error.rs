use thiserror::Error;

/// Errors raised by the Gaussian arithmetic, the teleportation engine and the sampler.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid index set: {0}")]
    InvalidIndices(String),

    #[error("invalid Gaussian state: {0}")]
    InvalidState(String),

    #[error("covariance has a degenerate direction (smallest eigenvalue {min_eigenvalue:e})")]
    DegenerateCovariance { min_eigenvalue: f64 },

    #[error("observed covariance block is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    DegenerateObservedBlock { min_eigenvalue: f64 },

    #[error("noise covariance is not symmetric")]
    NonSymmetricNoise,

    #[error("noise covariance is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    IndefiniteNoise { min_eigenvalue: f64 },

    #[error("invalid resource parameters: {0}")]
    InvalidResource(String),

    #[error("resource parameters do not define a normalizable density (ab - c1^2 = {det1:e}, ab - c2^2 = {det2:e})")]
    ImproperResource { det1: f64, det2: f64 },

    #[error("squeezing parameter must be finite and non-negative, got {0}")]
    NegativeSqueezing(f64),

    #[error("operation is not defined for the exact-limit resource {0}")]
    ExactLimitUnsupported(String),

    #[error("resource {resource} cannot be combined with the {variant} protocol: added noise diverges")]
    ImproperLimitCombination { resource: String, variant: String },

    #[error("input must be a single-mode state with positive-definite covariance: {0}")]
    DegenerateInput(String),

    #[error("added noise is negative in the {quadrature} quadrature ({value:e})")]
    NegativeNoise { quadrature: &'static str, value: f64 },

    #[error("coherent-state fidelity undefined: factors ({0:e}, {1:e}) must be positive")]
    UndefinedFidelity(f64, f64),

    #[error("sample count must be positive")]
    NonPositiveSamples,

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidConfig(String),

    #[error("only {accepted} samples fell inside the β window (need at least {required})")]
    WindowTooNarrow { accepted: u64, required: u64 },
}

impl Error {
    /// Stable variant name, used in machine-readable reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidIndices(_) => "InvalidIndices",
            Error::InvalidState(_) => "InvalidState",
            Error::DegenerateCovariance { .. } => "DegenerateCovariance",
            Error::DegenerateObservedBlock { .. } => "DegenerateObservedBlock",
            Error::NonSymmetricNoise => "NonSymmetricNoise",
            Error::IndefiniteNoise { .. } => "IndefiniteNoise",
            Error::InvalidResource(_) => "InvalidResource",
            Error::ImproperResource { .. } => "ImproperResource",
            Error::NegativeSqueezing(_) => "NegativeSqueezing",
            Error::ExactLimitUnsupported(_) => "ExactLimitUnsupported",
            Error::ImproperLimitCombination { .. } => "ImproperLimitCombination",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::NegativeNoise { .. } => "NegativeNoise",
            Error::UndefinedFidelity(..) => "UndefinedFidelity",
            Error::NonPositiveSamples => "NonPositiveSamples",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::WindowTooNarrow { .. } => "WindowTooNarrow",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
