use thiserror::Error;

pub type Result<T> = std::result::Result<T, GravError>;

/// Every failure the toolkit can surface. `code()` gives a stable string
/// identifier used in reports, `exit_code()` the CLI status class.
#[derive(Debug, Error)]
pub enum GravError {
    #[error("dimension d = {d} is too small (need d >= {min})")]
    DimensionTooSmall { d: usize, min: usize },

    #[error("metric is singular (|det| = {det:e})")]
    SingularMetric { det: f64 },

    #[error("metric is not Lorentzian (det = {det} >= 0)")]
    NonLorentzian { det: f64 },

    #[error("temporal degeneracy: g^00 = {g00:e}")]
    TemporalDegeneracy { g00: f64 },

    #[error("metric is not symmetric (max asymmetry {asymmetry:e})")]
    AsymmetricMetric { asymmetry: f64 },

    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("result rank {rank} exceeds the cap {cap}")]
    RankOverflow { rank: usize, cap: usize },

    #[error("unsupported symbol in bracket: {0}")]
    UnsupportedSymbol(String),

    #[error("Lagrangian forms disagree: B-form {b_form}, Christoffel form {christoffel}, relative error {relative:e}")]
    ChristoffelMismatch {
        b_form: f64,
        christoffel: f64,
        relative: f64,
    },

    #[error("spatial metric block degenerated at step {step}, site {site}")]
    MetricDegenerated { step: usize, site: usize },

    #[error("unstable evolution: {0}")]
    Unstable(String),

    #[error("no front: energy density below threshold everywhere")]
    NoFront,

    #[error("degenerate fit: remainder at noise floor (max {max_residual:e}); quadratic to machine precision")]
    DegenerateFit { max_residual: f64 },

    #[error("gauge functions violate the integrability condition (residual {residual:e})")]
    NonIntegrableGauge { residual: f64 },

    #[error("non-unitary drift {drift:e} at step {step}")]
    NonUnitaryDrift { step: usize, drift: f64 },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GravError {
    pub fn code(&self) -> &'static str {
        match self {
            GravError::DimensionTooSmall { .. } => "DimensionTooSmall",
            GravError::SingularMetric { .. } => "SingularMetric",
            GravError::NonLorentzian { .. } => "NonLorentzian",
            GravError::TemporalDegeneracy { .. } => "TemporalDegeneracy",
            GravError::AsymmetricMetric { .. } => "AsymmetricMetric",
            GravError::VarianceMismatch(_) => "VarianceMismatch",
            GravError::ShapeMismatch(_) => "ShapeMismatch",
            GravError::RankOverflow { .. } => "RankOverflow",
            GravError::UnsupportedSymbol(_) => "UnsupportedSymbol",
            GravError::ChristoffelMismatch { .. } => "ChristoffelMismatch",
            GravError::MetricDegenerated { .. } => "MetricDegenerated",
            GravError::Unstable(_) => "Unstable",
            GravError::NoFront => "NoFront",
            GravError::DegenerateFit { .. } => "DegenerateFit",
            GravError::NonIntegrableGauge { .. } => "NonIntegrableGauge",
            GravError::NonUnitaryDrift { .. } => "NonUnitaryDrift",
            GravError::ConfigInvalid(_) => "ConfigInvalid",
            GravError::Io(_) => "Io",
            GravError::Json(_) => "Json",
        }
    }

    /// 1 = check failure, 2 = configuration error, 3 = numeric degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            GravError::ConfigInvalid(_)
            | GravError::Io(_)
            | GravError::Json(_)
            | GravError::DimensionTooSmall { .. }
            | GravError::ShapeMismatch(_)
            | GravError::VarianceMismatch(_)
            | GravError::RankOverflow { .. }
            | GravError::AsymmetricMetric { .. }
            | GravError::UnsupportedSymbol(_) => 2,
            GravError::ChristoffelMismatch { .. } => 1,
            _ => 3,
        }
    }
}
