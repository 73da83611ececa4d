//! Symmetry-reduced short-vector search for cyclic and nega-cyclic lattices.

pub mod analytic;
pub mod bench;
pub mod constraints;
pub mod cyclotomic;
pub mod error;
pub mod hamiltonian;
pub mod hnf;
pub mod lattice;
pub mod oracle;
pub mod spectral;
pub mod vqe;

pub use error::{Error, Result};
