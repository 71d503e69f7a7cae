//! Construction, verification, and exhaustive classification of MDS codes
//! over small alphabets.
//!
//! The library is organized around a pipeline: finite-field tables ([`gf`]),
//! unrestricted block codes and distance/perfection checks ([`codes`]),
//! linear codes and parity-check normal forms ([`linear`]), the Latin
//! hypercube view of MDS codes with d = 3 and its linearity tests
//! ([`latin`]), code equivalence via colored-graph canonical labeling
//! ([`equiv`]), exhaustive classification up to equivalence ([`classify`]),
//! and the four perfect one-error-correcting codes of length 9 over an
//! 8-letter alphabet ([`appendix8`]).

pub mod appendix8;
mod bitset;
pub mod classify;
pub mod codes;
pub mod equiv;
pub mod gf;
pub mod latin;
pub mod linear;

pub use classify::{ClassifyOptions, ConsistencyRow, Registry, Seed, StepReport};
pub use codes::{Code, Word};
pub use equiv::{CanonResult, ColoredGraph, EquivMap};
pub use gf::Field;
pub use latin::{Hypercube, LinearityWitness, RectTable, TupleWitness};
pub use linear::Matrix;

use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field order {0} (supported: 2,3,4,5,7,8,9)")]
    UnsupportedOrder(u32),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("{0}")]
    BadArgument(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("registry lookup failed: code of length {n} over GF({q}) matches no class")]
    UnknownClass { n: usize, q: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
