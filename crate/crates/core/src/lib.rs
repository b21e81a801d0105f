//! Generalized quasiorders on finite sets.
//!
//! Relations are dense bitsets over `{0..n-1}^m`. The crate provides the
//! transitivity search and derived relations ([`analysis`]), coordinate and
//! quotient constructions ([`construct`]), formula evaluation
//! ([`formula`]), finite operations and preservation ([`ops`]),
//! enumeration ([`enumerate`]), the verification suites ([`suites`]) and
//! the bundled example relations ([`corpus`]).

pub mod analysis;
pub mod construct;
pub mod corpus;
pub mod enumerate;
pub mod error;
pub mod formula;
pub mod maps;
pub mod matrix;
pub mod ops;
pub mod partition;
pub mod relation;
pub mod search;
pub mod suites;
pub mod text;

#[cfg(test)]
mod testutil;

pub use analysis::{classify, ClassificationReport, Property, Witness};
pub use error::{GqError, Result};
pub use maps::{IndexMap, SurjectiveMap};
pub use matrix::Matrix;
pub use partition::EquivPartition;
pub use relation::{FiniteRelation, Universe};
