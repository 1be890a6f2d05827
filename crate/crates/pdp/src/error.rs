//! Error type shared across the crate.

/// Errors surfaced by table builders, samplers and probability evaluations.
///
/// Display strings are single-line and start with a stable machine-parseable
/// tag (`invalid_config:`, `resource_cap:`, ...).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Parameter or argument outside its documented domain.
    #[error("invalid_config: {0}")]
    InvalidConfig(String),

    /// A Pochhammer factor is exactly zero, so the log-magnitude is undefined.
    /// Kept distinct from domain errors: callers that can treat the product as
    /// zero should use the signed variant instead.
    #[error("degenerate_pochhammer: factor {index} of ({x} | {step})_{n} is zero")]
    DegeneratePochhammer { x: f64, step: f64, n: usize, index: usize },

    /// A table lookup outside the region the table was built for.
    #[error("table_coverage: entry (n={n}, t={t}) outside table built with n_max={n_max}, t_max={t_max}")]
    TableCoverage { n: usize, t: usize, n_max: usize, t_max: usize },

    /// Estimated allocation would exceed the configured memory cap.
    #[error("resource_cap: estimated {needed} bytes exceeds cap of {cap} bytes")]
    ResourceCap { needed: u64, cap: u64 },

    /// A numerical self-check failed (normalization drift, cancellation, ...).
    #[error("numeric: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
