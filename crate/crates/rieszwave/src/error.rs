use thiserror::Error;

/// Crate-wide error type.
///
/// Validation failures carry enough context to state *which* precondition was
/// violated; numerical failures carry the achieved accuracy so callers can
/// decide whether to retry with looser settings.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// An evaluation point lies outside the function's domain
    /// (e.g. the Riesz kernel at the origin).
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or table construction failed to reach its accuracy
    /// target; `achieved` is the estimated error actually attained.
    #[error("accuracy target {target:e} not reached: achieved {achieved:e} ({context})")]
    Accuracy {
        target: f64,
        achieved: f64,
        context: String,
    },

    /// A requested atom is absent from the sampled [`CascadeField`]
    /// (never silently treated as zero).
    ///
    /// [`CascadeField`]: crate::chaos::CascadeField
    #[error("missing atom at level {j}, shift {k} ({kind})")]
    MissingAtom { j: i32, k: i64, kind: &'static str },

    /// Truncation tail estimate exceeded the configured budget.
    #[error(
        "estimated discarded mass {estimate:e} exceeds budget {budget:e}; \
         increase j_max or k_halfwidth"
    )]
    TailBudget { estimate: f64, budget: f64 },

    /// Underlying I/O failure (cache files, CSV output).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A cache or config file had unexpected contents.
    #[error("format error: {0}")]
    Format(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for [`Error::InvalidParam`] from format arguments.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}
