//! Error type shared by every layer of the certification pipeline.

use thiserror::Error;

/// Everything that can go wrong between parsing a scenario and emitting a verdict.
#[derive(Debug, Error)]
pub enum Error {
    /// An element was fed to a group operation it does not belong to.
    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    /// Operation is undefined for this group kind (e.g. word balls in R^d).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A net could not be built (zero direction, empty schedule, non-divergent lengths).
    #[error("net construction failed: {0}")]
    NetConstruction(String),

    /// A pseudo-metric adapter failed a length-function axiom on sampled elements.
    #[error("pseudo-metric adapter rejected: {axiom} violated, witness {witness}")]
    AdapterRejected { axiom: &'static str, witness: String },

    /// Matrix/vector dimensions disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operator failed a structural flag it was declared with.
    #[error("operator flag violated: {0}")]
    FlagViolated(String),

    /// Eigendecomposition failed to reproduce its matrix within tolerance.
    #[error("spectral guard tripped: reconstruction residual {residual:.3e} exceeds {limit:.3e}")]
    SpectralGuard { residual: f64, limit: f64 },

    /// Resolvent requested at a point of (numerically) vanishing distance to the spectrum.
    #[error("resolvent point too close to spectrum: |lambda - z| = {gap:.3e}")]
    SingularResolvent { gap: f64 },

    /// Flow generators must commute pairwise.
    #[error("flow generators {i} and {j} do not commute: residual {residual:.3e}")]
    NonCommuting { i: usize, j: usize, residual: f64 },

    /// A probe/translate pair left the truncation ball's safe core.
    #[error("safe core violated: support radius {support} + step length {step} exceeds ball radius {radius}")]
    SafeCore { support: f64, step: f64, radius: f64 },

    /// Requested truncation ball cannot host the net and probes.
    #[error("truncation radius {requested} infeasible: minimal admissible radius is {minimal}")]
    InfeasibleRadius { requested: f64, minimal: f64 },

    /// Fewer net samples than the convergence window needs.
    #[error("too few net samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    /// Probe family is numerically dependent after normalization.
    #[error("degenerate probe family: Gram pivot {pivot:.3e} below 1e-10 at probe {index}")]
    DegenerateProbes { index: usize, pivot: f64 },

    /// Report components produced under different scenario digests.
    #[error("inconsistent scenario digests: {a} vs {b}")]
    DigestMismatch { a: String, b: String },

    /// Scenario configuration is structurally invalid; names the failing block.
    #[error("config error in [{block}]: {message}")]
    Config { block: String, message: String },
}

impl Error {
    pub fn config(block: &str, message: impl Into<String>) -> Self {
        Error::Config { block: block.to_string(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
