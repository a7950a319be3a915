//! Mahler expansions on ℤ_p: evaluation, composition, inversion and the exact
//! combinatorial tables that relate the binomial and monomial bases.

mod analytic;
pub mod combinatorics;
mod invert;
mod series;

pub use analytic::{analytic_compose, horner_compose, ints, unit_monomial};
pub use combinatorics::{omega, omega_from_generating, stirling_tables, StirlingTables};
pub use invert::{check_admissible, identity_agreement, invert, q_matrix};
pub use series::{
    binom_padic, compose, compose_omega, evaluate, expand, expand_poly_ints, forward_differences, mahler_to_monomial, monomial_to_mahler,
    q_numeric, q_omega, small_int, MahlerSeries, Tail,
};

#[cfg(test)]
mod tests;
