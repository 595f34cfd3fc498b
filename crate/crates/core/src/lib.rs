//! Exact computations for associative algebras with higher derivations:
//! the cohomology complex, abelian extensions and formal deformations.

pub mod algebra;
pub mod cli;
pub mod cochain;
pub mod deform;
pub mod error;
pub mod exactlin;
pub mod extensions;
pub mod fixtures;
pub mod freecons;
pub mod hder;
pub mod report;

pub use error::{Error, Result};
pub use exactlin::{Matrix, Scalar};
