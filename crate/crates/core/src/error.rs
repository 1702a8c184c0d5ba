use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Truncation problems are not errors: they travel in a
/// [`TruncationReport`](crate::fock::TruncationReport) next to the result.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angle {theta} is a special angle; the kernel is a distribution there")]
    SpecialAngle { theta: f64 },

    #[error("special angle in term `{term}` needs a limit (θα={theta_alpha}, θβ={theta_beta})")]
    SpecialAngleNeedsLimit {
        term: &'static str,
        theta_alpha: f64,
        theta_beta: f64,
    },

    #[error("angles inside the forbidden band: |cos(θα−θβ)| = {cos_diff:.3e} < {eps:.1e}")]
    ForbiddenBand { cos_diff: f64, eps: f64 },

    #[error("grid is not symmetric about 0 (first {first}, last {last})")]
    AsymmetricGrid { first: f64, last: f64 },

    #[error("sampled function does not decay at the grid boundary (relative edge value {edge:.3e})")]
    TailTooFat { edge: f64 },

    #[error("quadrature did not converge for {what}: change {change:.3e} (tail {tail:.3e})")]
    QuadratureDivergence {
        what: &'static str,
        change: f64,
        tail: f64,
    },

    #[error("Fock dimension {dim} is below the minimum of 4")]
    DimTooSmall { dim: usize },

    #[error("matrix norm {norm:.3e} is outside the supported exponential range")]
    Overflow { norm: f64 },

    #[error("operator is not an affine Gaussian unitary: fit residual {residual:.3e}")]
    NotGaussian { residual: f64 },

    #[error("degenerate Gaussian: |1+2A| = {value:.3e}")]
    DegenerateGaussian { value: f64 },

    #[error("P function is not a smooth function here: tail {tail:.3e}, domain-doubling change {change:.3e}")]
    PNotSmooth { tail: f64, change: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("malformed data: {0}")]
    Format(String),
}

impl Error {
    /// Variant name, used as a stable tag in diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SpecialAngle { .. } => "SpecialAngle",
            Error::SpecialAngleNeedsLimit { .. } => "SpecialAngleNeedsLimit",
            Error::ForbiddenBand { .. } => "ForbiddenBand",
            Error::AsymmetricGrid { .. } => "AsymmetricGrid",
            Error::TailTooFat { .. } => "TailTooFat",
            Error::QuadratureDivergence { .. } => "QuadratureDivergence",
            Error::DimTooSmall { .. } => "DimTooSmall",
            Error::Overflow { .. } => "Overflow",
            Error::NotGaussian { .. } => "NotGaussian",
            Error::DegenerateGaussian { .. } => "DegenerateGaussian",
            Error::PNotSmooth { .. } => "PNotSmooth",
            Error::Invalid(_) => "Invalid",
            Error::Format(_) => "Format",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
