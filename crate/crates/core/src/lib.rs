//! Detection of Darboux first integrals for planar polynomial vector fields
//! whose invariant curves have only one place at infinity.
//!
//! The pipeline resolves the singularities of the foliation lying over the
//! line at infinity, extends the resolution along chains governed by
//! positive irrational eigenvalue ratios, reads off candidate invariant
//! curves from linear systems attached to the resulting clusters, and solves
//! for the exponents of a first integral `prod f_i^{lambda_i}`.

pub mod algebra;
pub mod blowup;
pub mod cluster;
pub mod darboux;
pub mod error;
pub mod generator;
pub mod input;
pub mod projective;
pub mod reduction;
pub mod report;

pub use error::{Error, Result};
