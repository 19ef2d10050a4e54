use crate::iteration::TraceRow;

/// Unified error type for the solver core.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension must be at least {min} (got {got})")]
    InvalidDimension { min: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric: max |a_ij - a_ji| = {defect:.3e} exceeds {tol:.3e}")]
    NotSymmetric { defect: f64, tol: f64 },

    /// `pivot` is the zero-based index of the first non-positive Cholesky pivot.
    #[error("matrix is not positive definite: pivot {pivot} is non-positive")]
    NotSpd { pivot: usize },

    #[error("SVD did not converge within {sweeps} Jacobi sweeps")]
    SvdNoConvergence { sweeps: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("noise level must be non-negative (got {0})")]
    InvalidNoiseLevel(f64),

    /// The discrepancy target was still unmet after `max_iter` steps. The
    /// trace collected so far is preserved for diagnosis.
    #[error("no termination within {max_iter} iterations (last discrepancy {last_d:.6e})")]
    NonTermination {
        max_iter: usize,
        last_d: f64,
        trace: Vec<TraceRow>,
    },

    /// The start residual is already at or below the discrepancy target, so a
    /// parameter bound or search has nothing to work with.
    #[error("start residual {d0:.6e} is not above the discrepancy target {threshold:.6e}")]
    InfeasibleStart { d0: f64, threshold: f64 },

    #[error("Newton denominator underflowed ({value:.3e}); step aborted")]
    NewtonDenominatorUnderflow { value: f64 },

    /// The Newton update for the reciprocal regularization parameter must be
    /// strictly increasing; anything else signals numerical breakdown rather
    /// than a condition worth patching over.
    #[error("Newton update not increasing: r went from {r_old:.6e} to {r_new:.6e}")]
    NewtonNotIncreasing { r_old: f64, r_new: f64 },

    #[error("index function is not strictly increasing near t = {t:.6e}")]
    NotIncreasing { t: f64 },

    #[error("value {value:.6e} is outside the invertible range (0, {max:.6e}]")]
    OutOfRange { value: f64, max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
