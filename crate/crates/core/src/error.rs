use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition constraints: {0}")]
    InvalidConstraints(String),

    #[error("invalid variant: {0}")]
    InvalidVariant(String),

    #[error("unknown variant `{name}` (available: {})", available.join(", "))]
    UnknownVariant {
        name: String,
        available: Vec<String>,
    },

    #[error("invalid statistic descriptor `{0}` (expected `count`, `product` or `power_sum:k`)")]
    InvalidDescriptor(String),

    #[error("arithmetic overflow while computing {stat} of {parts:?}")]
    Overflow { stat: String, parts: Vec<u32> },

    #[error("partition count of {0} does not fit in 128 bits")]
    CountOverflow(usize),

    #[error("partition budget of {limit} exceeded at bus {bus}")]
    BudgetExceeded { bus: u32, limit: u64 },

    #[error("bus {bus}: {source}")]
    AtBus {
        bus: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown report format `{0}` (expected text, json or csv)")]
    UnknownFormat(String),

    #[error("malformed record: {0}")]
    MalformedRecord(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_bus(self, bus: u32) -> Self {
        match self {
            e @ Error::AtBus { .. } => e,
            e @ Error::BudgetExceeded { .. } => e,
            e => Error::AtBus {
                bus,
                source: Box::new(e),
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
