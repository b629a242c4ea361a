//! Box-cover and natural-join engine built on geometric resolution over
//! dyadic boxes.
//!
//! The crate is organised bottom-up:
//!
//! * [`dyadic`] — dyadic intervals/boxes, splitting, projection, range
//!   decomposition, and the textual box-file format.
//! * [`resolution`] — geometric resolution (general and ordered) on boxes.
//! * [`boxindex`] — the knowledge base: a multilevel dyadic tree with
//!   superbox lookup and containment enumeration.
//! * [`engine`] — the resolution engine: skeleton recursion, the outer
//!   cover loop in its preloaded/reloaded variants, run statistics, traces,
//!   and attribute-order suggestions.
//! * [`balance`] — balanced dimension partitions and the load-balanced
//!   engine variants that run in a lifted coordinate space.
//! * [`joins`] — relations, gap-box extraction from sorted-trie and
//!   dyadic-tree indices, join queries as box oracles, and hypergraph width
//!   measures.
//! * [`instances`] — deterministic generators for the hard-instance
//!   families used by the scaling benchmarks.
//! * [`verify`] — brute-force oracle and trace validation.

pub mod balance;
pub mod boxindex;
pub mod dyadic;
pub mod engine;
pub mod instances;
pub mod joins;
pub mod resolution;
pub mod verify;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
