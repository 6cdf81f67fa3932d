//! Maximally probable strictly r-furcating tree shapes.
//!
//! A strictly r-furcating rooted tree on n = w(r-1) + 1 leaves has w internal
//! nodes; a labeled history orders those nodes in time. This crate builds the
//! shape whose labelings have the most labeled histories via the r-ary
//! Huffman algorithm, counts labeled histories with and without simultaneous
//! branchings in arbitrary precision, and verifies the construction by
//! exhaustive enumeration over all shapes at desk scale.
//!
//! Modules:
//! - [`shape`]: canonical shapes, parsing, serialization, node statistics.
//! - [`enumerate`]: duplicate-free enumeration and independent counting of
//!   all shapes with n leaves.
//! - [`huffman`]: the r-merge operator, normal sequences, and the Huffman
//!   construction with deterministic or exhaustive tie handling.
//! - [`majorization`]: partial-sum dominance predicates and the exact
//!   product objective.
//! - [`histories`]: labeled-history counts N(T) by two independent formulas
//!   and tie-permitting counts E(T, z).
//! - [`maxprob`]: the closed-form construction, exhaustive verification,
//!   event tables, and the non-uniqueness family.
//! - [`bruteforce`]: naive reference counters used as oracles.
//! - [`selftest`]: the desk-scale acceptance checks run by the CLI.

#![forbid(unsafe_code)]

pub mod bruteforce;
pub mod enumerate;
pub mod error;
pub mod histories;
pub mod huffman;
pub mod majorization;
pub mod maxprob;
pub mod selftest;
pub mod shape;

pub use error::{Error, Result};
pub use histories::BigCount;
pub use shape::{NodeStats, RawTree, TreeShape};
