//! Exact enumeration of the adjunctive hierarchy of hereditarily finite sets.
//!
//! Level sizes are computed by exact recurrences ([`recurrence`], [`bounded`],
//! [`refinements`]) and cross-checked against brute-force construction
//! ([`oracle`]). [`asymptotics`] evaluates the growth constant with rigorous
//! error bounds.

pub mod asymptotics;
pub mod bound;
pub mod bounded;
pub mod error;
pub mod hfs;
pub mod hierarchy;
pub mod io;
pub mod oracle;
pub mod recurrence;
pub mod refinements;

pub use error::{Error, Result};

/// Exact nonnegative count.
pub type BigCount = num_bigint::BigUint;
