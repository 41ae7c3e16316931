//! Indexes for binary jumbled pattern matching.
//!
//! A query `(i, j)` asks whether the input holds a pattern of size `i` with
//! exactly `j` ones, such as a window of a string or a connected node set of
//! a tree. Strings, trees and grammar-compressed strings answer in constant
//! time from a [`MinMaxIndex`]. Vertex-colored graphs of small treewidth get
//! the full answer set from [`graph::all_queries`].
//!
//! ```
//! use jumbled::{BitSeq, ChunkTable};
//! use jumbled::string_index::build_minmax_packed;
//!
//! let s: BitSeq = "1011".parse().unwrap();
//! let idx = build_minmax_packed(&s, &ChunkTable::default()).unwrap();
//! assert!(idx.query(2, 2));
//! assert!(!idx.query(3, 1));
//! ```

#[macro_use]
mod simd;

pub mod bench;
pub mod bitseq;
pub mod error;
pub mod gen;
pub mod grammar;
pub mod graph;
pub mod oracle;
pub mod persist;
pub mod string_index;
pub mod tree;

pub use bitseq::{BitSeq, ChunkTable, RankIndex, StepArray};
pub use error::{Error, Result};
pub use oracle::QuerySet;
pub use persist::{IndexBody, IndexFile, IndexKind};
pub use string_index::{Extremum, MinMaxIndex, SplitString};
