use std::path::PathBuf;

/// Everything that can go wrong while evaluating detector observables.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("root not bracketed: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    BracketViolation { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("{what}: quadrature did not converge (error estimate {error_estimate:.3e}, tolerance {tol:.3e})")]
    Quadrature {
        what: &'static str,
        error_estimate: f64,
        tol: f64,
    },

    #[error("principal value unstable under excision change: |I(d) - I(d/2)| = {diff:.3e} > {limit:.3e}")]
    PrincipalValueUnstable { diff: f64, limit: f64 },

    #[error("expected exactly one sign change of the denominator on [{lo}, {hi}], found {found}")]
    PoleCount { lo: f64, hi: f64, found: usize },

    #[error("non-simple zero of the denominator at {at} (|D'| = {slope:.3e})")]
    TangentialZero { at: f64, slope: f64 },

    #[error("poles at {left} and {right} are too close to separate")]
    PoleSpacing { left: f64, right: f64 },

    #[error("epsilon extrapolation failed: {0}")]
    Extrapolation(String),

    #[error("invalid density block: {0}")]
    InvalidBlock(String),

    #[error("mutual information came out negative ({0:.3e}), numerical fault")]
    NegativeMutualInformation(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag, used in sweep status columns.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::BracketViolation { .. } => "bracket",
            Error::Quadrature { .. } => "quadrature",
            Error::PrincipalValueUnstable { .. } => "pv_unstable",
            Error::PoleCount { .. } => "pole_count",
            Error::TangentialZero { .. } => "tangential_pole",
            Error::PoleSpacing { .. } => "pole_spacing",
            Error::Extrapolation(_) => "extrapolation",
            Error::InvalidBlock(_) => "positivity",
            Error::NegativeMutualInformation(_) => "negative_mi",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
