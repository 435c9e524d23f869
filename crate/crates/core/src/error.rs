use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Configuration problems are *not* errors: [`crate::config::validate_config`]
/// returns them as data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular parameters: {0}")]
    Singular(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("state space of dimension {dim} exceeds the capacity cap {cap}")]
    Capacity { dim: u128, cap: usize },

    #[error("invalid propagation settings: {0}")]
    Settings(String),

    #[error("norm drift {drift:.3e} at step {step} exceeds tolerance {tol:.1e}")]
    NormDrift { step: usize, drift: f64, tol: f64 },

    #[error("phase jump of {jump:.3} rad between samples {index} and {next}; sampling too coarse to unwrap", next = index + 1)]
    Unwrap { index: usize, jump: f64 },

    #[error("design error: {0}; run the detuning designer first")]
    Design(String),

    #[error("no admissible root for target {target}: {}", describe_rejections(.rejected))]
    DesignInfeasible {
        target: usize,
        rejected: Vec<crate::design::RejectedRoot>,
    },

    #[error("length mismatch: {0}")]
    Length(String),

    #[error("error-budget weights: {0}")]
    Weights(String),
}

fn describe_rejections(rejected: &[crate::design::RejectedRoot]) -> String {
    if rejected.is_empty() {
        return "no sign change found in the bracket".to_string();
    }
    rejected
        .iter()
        .map(|r| format!("x = {:.6} ({})", r.delta, r.reason))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
