use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A homogeneous multiplier (or norm) was applied to a field with nonzero mean.
    #[error("zero mode rejected: field mean {mean:e} is outside the domain of the operator")]
    ZeroModeRejected { mean: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("iterates collapsed to zero after {iterations} iterations")]
    CollapseToZero { iterations: usize },

    #[error("under-resolved: effective spacing {spacing:e} exceeds bound {bound:e}")]
    UnderResolved { spacing: f64, bound: f64 },

    #[error("spectral configuration violated: {negative} negative, zero mode {zero_mode}, detail: {detail}")]
    SpectralConfigViolation { negative: usize, zero_mode: bool, detail: String },

    #[error("functional undefined on the zero field")]
    ZeroField,

    #[error("constraint vectors are linearly dependent")]
    DegenerateConstraints,

    #[error("blowup detected at t = {t}: max norm {max_norm:e} exceeds ceiling {ceiling:e}")]
    BlowupDetected { t: f64, max_norm: f64, ceiling: f64 },

    #[error("resolution lost at t = {t}: spectral tail fraction {tail:e}")]
    ResolutionLoss { t: f64, tail: f64 },

    #[error("Newton refinement stalled (|f| = {residual:e})")]
    NewtonStall { residual: f64 },

    #[error("Dirichlet-Neumann expansion diverging: term ratio {ratio}")]
    ExpansionDiverging { ratio: f64 },

    #[error("nonzero mean {mean:e} where a mean-zero field is required")]
    NonZeroMean { mean: f64 },

    #[error("vortex field evaluated within {distance:e} of a singularity (exclusion radius {radius:e})")]
    SingularEvaluation { distance: f64, radius: f64 },

    #[error("Newton Jacobian is singular")]
    JacobianSingular,

    #[error("admissibility lost at t = {t}: vortex-surface separation {separation:e}")]
    AdmissibilityLost { t: f64, separation: f64 },

    #[error("operator matrix asymmetric: relative defect {defect:e}")]
    SymmetryDefect { defect: f64 },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
