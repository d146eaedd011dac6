use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}{}", context_suffix(.context))]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("phase-space mismatch: operands live on different spaces ({left} vs {right} modes)")]
    SpaceMismatch { left: usize, right: usize },

    #[error("not representable by the analytic catalog: {0}")]
    NonAnalytic(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigen-solve failed: {0}")]
    Eigen(String),

    #[error("quadrature did not converge: achieved error {achieved:.3e} above target {target:.3e}")]
    QuadratureNoConvergence { achieved: f64, target: f64 },

    #[error("truncation tail {tail:.3e} exceeds {limit:.3e} of the total; retry with degree cutoff >= {suggested}")]
    TruncationTail {
        tail: f64,
        limit: f64,
        suggested: usize,
    },
}

fn context_suffix(ctx: &str) -> String {
    if ctx.is_empty() {
        String::new()
    } else {
        format!(" ({ctx})")
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
