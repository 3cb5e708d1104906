use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum OsmError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate symbol: k^2 + eta = 0 and epsilon = 0")]
    DegenerateSymbol,

    #[error("mesh coarser than domain: h = {h} >= Lhat = {l_hat}")]
    MeshCoarserThanDomain { h: f64, l_hat: f64 },

    #[error("singular denominator in interface coefficients (subdomain {subdomain}, k = {k})")]
    SingularDenominator { subdomain: usize, k: f64 },

    #[error("eigensolver did not converge; norm of unreduced part {residual_norm:.3e}")]
    EigenNoConvergence { residual_norm: f64 },

    #[error("grid misalignment: {0}")]
    GridMisalignment(String),

    #[error("singular local matrix in subdomain {subdomain}")]
    SingularLocal { subdomain: usize },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("non-positive value in log-log fit: ({x}, {y})")]
    NonPositive { x: f64, y: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, OsmError>;
