use thiserror::Error;

/// Failure modes of the numerical kernels and of the models built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("{op}: argument outside the domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: no convergence after {iterations} iterations (estimate {estimate:e}, error bound {bound:e})")]
    NoConvergence {
        op: &'static str,
        iterations: usize,
        estimate: f64,
        bound: f64,
    },

    #[error("{op}: no sign change on [{lo:e}, {hi:e}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        op: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{op}: no root in the search range ({detail})")]
    NoRoot { op: &'static str, detail: String },
}

impl NumericError {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        NumericError::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// Name of the operation that failed.
    pub fn op(&self) -> &'static str {
        match self {
            NumericError::Domain { op, .. }
            | NumericError::NoConvergence { op, .. }
            | NumericError::NoSignChange { op, .. }
            | NumericError::NoRoot { op, .. } => op,
        }
    }
}

pub type Result<T> = std::result::Result<T, NumericError>;
