//! Difference quotients `Φ̄ⁿ` and `Υⁿ = f^{[n]}`, sampled `C^n_b` norms, higher
//! differentials, and numeric verification of the product and chain rules for them.

mod checks;
mod eval;
mod expr;
mod fnrepr;
mod points;

pub use checks::{chain_check, leibniz_check, leibniz_multi_check, CheckPoint, CheckReport};
pub use eval::{cnb_norm, differential_eval, phi_eval, small_scalar, upsilon_eval, upsilon_polynomial, Flavor, Sampler, MAX_ORDER};
pub use expr::{divided_difference, eval_word, Expr, Op};
pub use fnrepr::{Backing, Ball, Domain, Evaluator, FnRepr, Smoothness};
pub use points::{note2_table, Note2Table, PhiPoint, UpsilonPoint};

#[cfg(test)]
mod tests;
