//! Error type shared by every module, with a stable mapping onto process
//! exit codes for the CLI.
//!
//! Two failure families matter operationally and get their own exit code:
//! domain/precondition violations (exit 1) and resource/coverage exhaustion
//! (exit 2). Everything numeric that "should have worked but did not"
//! (quadrature refusing to converge) is reported as a domain-class failure:
//! it signals a misuse of the configured budgets, not an exhausted table.

use thiserror::Error;

/// Crate-wide error enum.
#[derive(Debug, Error)]
pub enum Error {
    /// Mathematical domain violation: Gamma pole, unsupported parameter
    /// range, imprimitive character where a primitive one is required, …
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition on the inputs does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A configured ceiling (table bound, enumeration count) was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A sum needs coefficients or representation numbers beyond what the
    /// supplied table covers.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// Adaptive quadrature or contour integration exhausted its budget
    /// without reaching the requested tolerance.
    #[error("failed to converge: {0}")]
    Nonconvergence(String),

    /// Config or table file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 for domain/precondition-class
    /// failures, 2 for resource/coverage-class failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) | Error::Coverage(_) => 2,
            _ => 1,
        }
    }

    /// The bare message, without the family prefix that `Display` adds.
    /// The CLI pairs it with [`category`](Error::category) instead.
    pub fn message(&self) -> String {
        match self {
            Error::Domain(m)
            | Error::Precondition(m)
            | Error::Resource(m)
            | Error::Coverage(m)
            | Error::Nonconvergence(m) => m.clone(),
            Error::Parse { line, msg } => format!("line {line}: {msg}"),
            Error::Io(e) => e.to_string(),
        }
    }

    /// Short machine-readable category tag used in diagnostic output.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Resource(_) => "resource",
            Error::Coverage(_) => "coverage",
            Error::Nonconvergence(_) => "nonconvergence",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
