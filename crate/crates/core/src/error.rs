use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{quantity} = {value} is outside its domain ({expected})")]
    Domain {
        quantity: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// `w - 1` vanished, so the collective relaxation time diverges.
    #[error("{quantity} is singular: aggressiveness excess w - 1 = {excess:e}")]
    Singular { quantity: &'static str, excess: f64 },

    #[error("invalid model parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("degenerate conserved state (rho = {rho:e}, q = {q:e})")]
    DegenerateState { rho: f64, q: f64 },

    #[error(
        "quadrature did not reach relative tolerance {tolerance:e} with {nodes} nodes \
         (estimate {estimate}, last change {change:e})"
    )]
    Accuracy {
        estimate: f64,
        change: f64,
        tolerance: f64,
        nodes: usize,
    },

    #[error("Gauss-Laguerre eigenvalue iteration did not converge for {nodes} nodes")]
    RuleConstruction { nodes: usize },

    #[error("step failed at cell {cell} (x = {x} m): {reason} (rho = {rho}, q = {q})")]
    StepFailure {
        cell: usize,
        x: f64,
        rho: f64,
        q: f64,
        reason: &'static str,
    },

    #[error("run aborted at t = {t} s, step {step}: {source}")]
    Run {
        t: f64,
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid solver configuration `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
}
