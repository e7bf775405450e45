//! The zero-knowledge layer: decomposition gadgets, statement and witness
//! construction for the signing relation, the three-move argument with its
//! extractor and simulator, and Fiat-Shamir aggregation.

pub mod fs;
pub mod gadgets;
pub mod protocol;
pub mod statement;
