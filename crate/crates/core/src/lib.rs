//! Search-based testing of gate-model quantum circuits.
//!
//! Test cases are weighted sums of commuting Pauli strings. A compact
//! program specification records the expected outcome distribution of one
//! designated string per family; the oracle turns it into an expected
//! expectation value for any test case drawn from that family, and the
//! search drives test generation towards large |expected − observed| gaps.
//!
//! Modules:
//! - [`circuit`]: gates, the text format, statevector simulation, sampling
//! - [`pauli`]: Pauli strings, commutation, Z-family, brute-force partitioning
//! - [`oracle`]: test cases, compact specifications, expectation and fitness
//! - [`search`]: candidate encoding and the RS / GA / HC / (1+1) EA strategies
//! - [`noise`]: synthetic noise channels and zero-noise extrapolation
//! - [`bench`]: benchmark generators, fault injection, campaign metrics

pub mod bench;
pub mod circuit;
pub mod noise;
pub mod error;
pub mod oracle;
pub mod pauli;
pub mod search;
pub mod seed;

pub use error::{Error, Result};
