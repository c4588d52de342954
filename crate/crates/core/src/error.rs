use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the requested operation.
    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    /// The operation is not implemented for this family or configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// `symmetrize` was applied to a triplet that is already symmetrized.
    #[error("triplet is already symmetrized; symmetrize applies to model triplets only")]
    AlreadySymmetrized,

    /// An operation that needs a symmetrized triplet received a model triplet.
    #[error("operation requires a symmetrized triplet")]
    NotSymmetrized,

    /// A density failed its mass check.
    #[error("mass bound violated ({bound}): mass {mass:.3e} outside 1 ± {tol:.1e}")]
    MassBound { bound: &'static str, mass: f64, tol: f64 },

    /// Clipping negative ringing required too large a correction.
    #[error("renormalization factor {factor} exceeds the allowed 1 + {tol:.1e}")]
    Renormalization { factor: f64, tol: f64 },

    /// Adaptive quadrature did not reach its tolerance.
    #[error("quadrature failed in {context}: error estimate {residual:.3e}")]
    Quadrature { context: String, residual: f64 },

    /// A sequence of partial values did not settle.
    #[error("no convergence in {context}: last partials {previous:.6e}, {last:.6e}")]
    NonConvergence { context: String, previous: f64, last: f64 },

    /// A sequence required to be monotone was not.
    #[error("monotonicity violated in {context} by {violation:.3e}; refine the grid")]
    Monotonicity { context: String, violation: f64 },

    /// Problem size exceeds the dense budget.
    #[error("size {n} exceeds the budget of {limit} for {what}")]
    Budget { what: &'static str, n: usize, limit: usize },

    /// Iterative linear solve failed.
    #[error("linear solve failed: relative residual {residual:.3e}")]
    Solve { residual: f64 },

    /// A solution left its admissible range.
    #[error("bound violated in {context}: range [{min:.3e}, {max:.3e}]")]
    BoundViolation { context: String, min: f64, max: f64 },

    /// Precondition on the recurrence class failed.
    #[error("classification precondition failed: {0}")]
    Classification(String),

    /// A regression fit was rejected.
    #[error("tail fit rejected: R² = {r_squared:.4}")]
    PoorFit { r_squared: f64 },

    /// Too much marginal mass fell on untrusted rows.
    #[error("untrusted mass deficit {deficit:.3e} exceeds {limit:.1e}")]
    Deficit { deficit: f64, limit: f64 },

    /// Two estimates of one quantity disagree beyond their tolerance.
    #[error("{context}: {left:.9e} vs {right:.9e}")]
    Mismatch { context: String, left: f64, right: f64 },

    /// Two gridded objects live on different grids.
    #[error("grid mismatch")]
    GridMismatch,
}

impl Error {
    pub(crate) fn param(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter { name, detail: detail.into() }
    }

    /// True for errors caused by the request itself rather than by numerical tolerances.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Unsupported(_)
                | Error::AlreadySymmetrized
                | Error::NotSymmetrized
                | Error::Budget { .. }
                | Error::GridMismatch
                | Error::Classification(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
