//! Solver for Conway's wizards puzzles.
//!
//! Wizard A's children have ages summing to the bus number. Wizard B would be
//! told some statistics of those ages (the key), A says that is not enough,
//! and B then claims to know one of them (the target). A bus number is a
//! solution when the partitions of the bus that share a key with another
//! partition all agree on the target.
//!
//! - [`partition`] streams partitions of a bus in canonical order.
//! - [`stats`] computes exact counts, products and power sums.
//! - [`variant`] describes which statistics are disclosed.
//! - [`engine`] finds ambiguity classes, valid buses and the stopping bus.
//! - [`report`] and [`cache`] serialize results and support resumable scans.

pub mod cache;
pub mod engine;
pub mod error;
pub mod partition;
pub mod report;
pub mod stats;
pub mod variant;

pub use cache::{analyze_cached, fingerprint, ScanCache};
pub use engine::{
    analyze_bus, is_valid_bus, solve, solve_with, verify_append_one_monotonicity, AmbiguityClass,
    AnalysisOptions, BusAnalysis, Engine, MonotonicityReport, RealismFilter, SolveOutcome,
    Termination,
};
pub use error::{Error, Result};
pub use partition::{count_partitions, enumerate_partitions, Partition, PartitionConstraints};
pub use report::{
    render_report, Format, OutcomeDocument, ResultRecord, TextOptions, SCHEMA_VERSION,
};
pub use stats::{evaluate, KeyValue, StatDescriptor};
pub use variant::{builtin_variant, custom_variant, CountBounds, Registry, VariantSpec};
