//! Computer algebra for non-archimedean analysis: truncated local field arithmetic,
//! difference-quotient calculus, Mahler expansions, permutation towers of
//! diffeomorphisms, one-parameter subgroups in positive characteristic and loop monoids.

pub mod calculus;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod loops;
pub mod mahler;
pub mod oneparam;
pub mod poly;
pub mod tower;
pub mod ultrametric;

pub use error::{Error, Result};
