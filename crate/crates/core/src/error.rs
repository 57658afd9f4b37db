//! Error type shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// A distribution or curve parameter fails its construction invariant.
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Not enough usable observations to carry out the operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The sample admits no finite maximum-likelihood solution.
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    /// The scalar solver exhausted its iteration budget.
    #[error(
        "solver did not converge after {iterations} iterations \
         (last shape = {last_shape:.6e}, residual = {residual:.3e})"
    )]
    NoConvergence {
        iterations: u32,
        last_shape: f64,
        residual: f64,
    },

    /// Quadrature finished but could not certify the requested accuracy.
    #[error(
        "quadrature accuracy {achieved:.3e} misses target {target:.3e} \
         (estimate {estimate:.9e})"
    )]
    Accuracy {
        estimate: f64,
        achieved: f64,
        target: f64,
    },

    /// A power curve violates its structural invariants.
    #[error("power curve error: {0}")]
    Curve(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Input file does not match the documented schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Command-line misuse (unknown table id, missing argument, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// Reference verification found at least one failing cell.
    #[error("verification failed: {0}")]
    Verification(String),

    /// An error raised while analyzing a specific station.
    #[error("station {station}: {source}")]
    Station {
        station: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit code: 1 usage, 2 data/schema, 3 numerical, 4 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Domain(_)
            | Error::InvalidParameter { .. }
            | Error::InsufficientData(_)
            | Error::Degenerate(_)
            | Error::Curve(_)
            | Error::Io { .. }
            | Error::Schema(_) => 2,
            Error::NoConvergence { .. } | Error::Accuracy { .. } => 3,
            Error::Verification(_) => 4,
            Error::Station { source, .. } => source.exit_code(),
        }
    }

    /// Attach the station key an error occurred for.
    pub fn for_station(self, station: &str) -> Error {
        Error::Station {
            station: station.to_string(),
            source: Box::new(self),
        }
    }
}
