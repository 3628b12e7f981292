//! Exact state-vector simulation of quantum query algorithms.
//!
//! The crate models oracle access at the level of query programs: unitaries
//! interleaved with oracle calls on a fixed query register. On top of that
//! it provides Grover search, query-magnitude tracing with timed answer
//! patches, the compute-copy-uncompute transform and majority-vote boosting,
//! plus seeded Monte-Carlo experiments over random oracles.

pub mod bits;
pub mod error;
pub mod experiments;
pub mod grover;
pub mod oracle;
pub mod program;
pub mod report;
pub mod rng;
pub mod statevector;
pub mod subroutine;

pub use error::{Error, Result};
pub use grover::GroverSchedule;
pub use oracle::{Oracle, OracleKind, OraclePatch};
pub use program::{Gate, HybridReport, QueryMode, QueryProgram, QueryStep, QueryTrace, Step, TimedPatch};
pub use report::ExperimentReport;
pub use statevector::{Distribution, StateVector, UnitaryOp, TOLERANCE};
pub use subroutine::TidyReport;
