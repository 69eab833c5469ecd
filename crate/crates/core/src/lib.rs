//! Hierarchical in-memory associative arrays.
//!
//! An [`AssociativeArray`] maps (row key, column key) pairs to 64-bit counts
//! and supports semiring algebra over them. A [`HierarchicalArray`] stacks
//! several of these behind non-zero cut thresholds so that streaming block
//! updates land in a small layer and cascade upward only when a layer
//! overflows its cut.
//!
//! The crate also ships a seedable power-law edge-stream generator
//! ([`stream_gen`]), a shared-nothing multi-worker update-rate benchmark
//! ([`bench`]), TSV triple files ([`tsv`]) and the `hierassoc` command line
//! front end ([`cli`]).

pub mod assoc;
pub mod bench;
pub mod cli;
mod error;
pub mod hier;
pub mod stream_gen;
pub mod tsv;

pub use assoc::semiring::{BinaryOp, ValueSemiring};
pub use assoc::{AssociativeArray, Key, Triple, Value};
pub use bench::{BenchConfig, BenchReport, Mode};
pub use error::{Error, Result};
pub use hier::{CutSchedule, HierStats, HierarchicalArray};
pub use stream_gen::{KeyFormat, StreamConfig};
