//! Semiclassical one-body density matrices of trapped Fermi gases.

// negated float comparisons are used on purpose so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod cli;
pub mod error;
pub mod fd;
pub mod fermi;
pub mod odm;
pub mod oracle;
pub mod potential;
#[cfg(test)]
mod properties;
pub mod quadrature;
pub mod special;
pub mod suites;
pub mod symmetry;

pub use error::{Error, Result};
