//! Exact truncated arithmetic over ℚ_p and 𝔽_{p^u}((θ)), residue rings and valuation combinatorics.

mod element;
pub mod fq;
pub mod literal;
mod residue;
pub mod valuation;

pub use element::{Family, FieldDescriptor, Lfe, LocalFieldElement, Norm, DEFAULT_PRECISION};
pub use literal::parse_element;
pub use residue::{project, ProjectionMap, ResidueRing};
pub use valuation::{binom_valuation, binom_valuation_exponent, carmichael_exponent, digit_sum, legendre_lambda};

/// Trial-division primality test for the small primes used as field characteristics.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
