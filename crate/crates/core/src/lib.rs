//! Forward-secure group signatures over integer lattices, desk scale.
//!
//! The crate builds the full pipeline: exact mod-q and integer linear
//! algebra, discrete Gaussian sampling, gadget trapdoors with preimage
//! sampling and basis delegation, the per-bit matrix-concatenation
//! signature, binary-tree key evolution, identity-escrow encryption for
//! opening, and a three-move zero-knowledge argument with its
//! Fiat-Shamir aggregation. Parameters are toy sized and carry no
//! concrete cryptographic security; every contract is instead checked
//! exactly or statistically by the test suite.

pub mod bonsai;
pub mod dd;
pub mod encode;
pub mod error;
pub mod gauss;
pub mod hash;
pub mod hnf;
pub mod ibe;
pub mod keys;
pub mod mat;
pub mod ots;
pub mod params;
pub mod scheme;
pub mod timetree;
pub mod trapdoor;
pub mod wire;
pub mod zq;

pub mod stern;

pub use error::{Error, Result};
