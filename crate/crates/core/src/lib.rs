//! Exact partition counts for totally positive integers in real quadratic
//! fields `Q(√D)`.
//!
//! The engine evaluates `p_K(α)` through a divisor-sum recurrence over a
//! column grid, cross-checks it against a brute-force enumerator, and builds
//! the parity and search experiments on top of it.

mod bigjson;
pub mod cli;
pub mod contfrac;
pub mod error;
pub mod fixtures;
pub mod oracle;
pub mod parity;
pub mod partition;
pub mod quadfield;
pub mod search;

pub use contfrac::FieldContext;
pub use error::{Error, Result};
pub use partition::{Parallelism, PartitionGrid};
pub use quadfield::{FieldId, QElement};
