use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The k-th and (k+1)-th smallest singular values are too close for the
    /// split subspace to be well defined.
    #[error("degenerate spectral split: sigma_k = {lower:e}, sigma_k+1 = {upper:e} (gap {gap:e} < tol {tol:e})")]
    DegenerateGap {
        lower: f64,
        upper: f64,
        gap: f64,
        tol: f64,
    },

    #[error("out of regime: 2*x*||E|| = {lhs:e} >= sigma gap {sigma_gap:e}")]
    OutOfRegime { lhs: f64, sigma_gap: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no gap index in the sorted distance list")]
    NoGap,

    #[error("no candidate set satisfies the size cap {cap}")]
    NoCandidate { cap: f64 },

    #[error("no cluster count in 2..={k_max} produced a partition: {}", summarize(.failures))]
    EstimateK {
        k_max: usize,
        failures: Vec<(usize, String)>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn summarize(failures: &[(usize, String)]) -> String {
    failures
        .iter()
        .map(|(k, e)| format!("k={k}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
