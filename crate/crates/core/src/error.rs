use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the analytic modules, the simulator and the scenario shell.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A derived quantity overflows the supported numeric range.
    #[error("range error: {0}")]
    Range(String),

    /// The failure criterion is already met at the left end of the bracket.
    #[error("root not bracketed: n*q(0) = {value} already reaches criterion level {level}")]
    NotBracketed { value: f64, level: f64 },

    /// The failure criterion is never met inside the search bracket.
    #[error("criterion unreachable: n*q stays below {level} up to t = {t_max}")]
    Unreachable { level: f64, t_max: f64 },

    /// A simulation plan asks for more individual draws than the cap allows.
    #[error("budget exceeded: {requested} individual draws requested, cap is {cap}; reduce n or runs")]
    Budget { requested: f64, cap: f64 },

    /// A scenario file or parameter set failed validation.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) => 2,
            Error::Domain(_)
            | Error::Range(_)
            | Error::NotBracketed { .. }
            | Error::Unreachable { .. } => 3,
            Error::Budget { .. } => 4,
            Error::Io { .. } => 1,
        }
    }

    /// Short machine-readable tag, printed as `kind=<tag>` on stderr.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Range(_) => "range",
            Error::NotBracketed { .. } => "not-bracketed",
            Error::Unreachable { .. } => "unreachable",
            Error::Budget { .. } => "budget",
            Error::Schema(_) => "schema",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
