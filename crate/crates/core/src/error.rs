//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Vertex set has rank < K (or zero diameter).
    #[error("degenerate simplex: |det|/diameter^K = {det_ratio:.3e} below threshold {threshold:.1e}")]
    DegenerateSimplex { det_ratio: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible isoperimetry parameters: no simplex accepted in {attempts} attempts")]
    InfeasibleParams { attempts: usize },

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("pairing error: point count {count} is odd")]
    OddPairCount { count: usize },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// The radius formula's denominator is nonpositive at this SNR.
    #[error(
        "snr too low: radius denominator {denominator:.6} <= 0; \
         snr must exceed {critical_snr:.6} for dim {dim}, theta_lower {theta_lower}"
    )]
    SnrTooLow {
        denominator: f64,
        critical_snr: f64,
        dim: usize,
        theta_lower: f64,
    },

    #[error("degenerate data: pair statistic is zero (all points identical?)")]
    DegenerateData,

    #[error(
        "covering set too large: {points:.3e} points exceeds cap {cap} \
         (radius {radius:.4}, eps_cov {eps_cov:.4e}, dim {dim}); raise eps or the cap"
    )]
    FamilyTooLarge {
        points: f64,
        cap: u64,
        radius: f64,
        eps_cov: f64,
        dim: usize,
    },

    #[error("too many candidates: C({points}, {tuple}) = {count:.3e} exceeds cap {cap}")]
    TooManyCandidates {
        points: usize,
        tuple: usize,
        count: f64,
        cap: u64,
    },

    #[error("no candidates survived filtering ({raw} raw tuples)")]
    EmptyFamily { raw: u64 },

    #[error("invalid contest pair: i = j = {0}")]
    InvalidPair(usize),

    #[error("exact measure unsupported for dim {dim}; exact mode requires dim <= 2")]
    UnsupportedExact { dim: usize },

    #[error("out of regime: snr {snr} must exceed {min_snr}")]
    OutOfRegime { snr: f64, min_snr: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Pipeline-stage wrapper carrying a remediation hint.
    #[error("{stage} stage failed: {source} (hint: {hint})")]
    Stage {
        stage: &'static str,
        hint: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str, hint: &'static str) -> Error {
        Error::Stage {
            stage,
            hint,
            source: Box::new(self),
        }
    }
}
