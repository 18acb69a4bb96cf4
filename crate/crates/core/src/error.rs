use thiserror::Error;

/// Errors raised by the geometry and charge routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate metric at {point:?}: {detail}")]
    DegenerateMetric { point: Vec<f64>, detail: String },

    #[error("signature error at {point:?}: {detail}")]
    Signature { point: Vec<f64>, detail: String },

    #[error("point {point:?} outside the domain of {chart}: {detail}")]
    Domain {
        chart: String,
        point: Vec<f64>,
        detail: String,
    },

    #[error("query within the horizon guard band (|r - lambda| = {distance:e})")]
    Horizon { distance: f64 },

    #[error("invalid parameter `{name}`: {detail}")]
    Parameter { name: String, detail: String },

    #[error("singular slice: {0}")]
    SingularSlice(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("coordinate inversion did not converge (residual {residual:e} after {iterations} iterations)")]
    Inversion { residual: f64, iterations: usize },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("no horizon found: {0}")]
    NotFound(String),

    #[error("direction undefined at the reference point")]
    UndefinedDirection,

    #[error("incomplete report: {0}")]
    IncompleteReport(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(name: &str, detail: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.to_string(),
            detail: detail.into(),
        }
    }

    pub fn domain(chart: &str, point: &[f64], detail: impl Into<String>) -> Self {
        Error::Domain {
            chart: chart.to_string(),
            point: point.to_vec(),
            detail: detail.into(),
        }
    }

    /// Short machine-readable tag used in diagnostic output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateMetric { .. } => "degenerate-metric",
            Error::Signature { .. } => "signature",
            Error::Domain { .. } => "domain",
            Error::Horizon { .. } => "horizon",
            Error::Parameter { .. } => "parameter",
            Error::SingularSlice(_) => "singular-slice",
            Error::NonFinite(_) => "non-finite",
            Error::Inversion { .. } => "inversion",
            Error::Integration(_) => "integration",
            Error::NotFound(_) => "not-found",
            Error::UndefinedDirection => "undefined-direction",
            Error::IncompleteReport(_) => "incomplete-report",
        }
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::parameter("lambda", format!("must be positive, got {lambda}")));
    }
    Ok(())
}

pub(crate) fn check_cosmological_constant(cc: f64) -> Result<()> {
    if !(cc.is_finite() && cc > 0.0) {
        return Err(Error::parameter(
            "cosmological_constant",
            format!("must be positive, got {cc}"),
        ));
    }
    Ok(())
}
