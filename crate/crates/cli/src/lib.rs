//! File formats and commands behind the `credal` binary.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 semantic input error,
//! 3 parse error.

pub mod commands;
pub mod format;
pub mod query;

pub use commands::Outcome;
pub use format::{Failure, NetworkFile};
pub use query::{Query, QueryFile};
