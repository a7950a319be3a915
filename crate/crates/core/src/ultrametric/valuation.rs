//! Valuation combinatorics: Legendre's formula, binomial valuations and unit group exponents.

use crate::error::{Error, Result};

use super::Norm;

/// Sum of the base-p digits of n.
pub fn digit_sum(mut n: u64, p: u32) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p as u64;
        n /= p as u64;
    }
    s
}

/// λ(n) = (n − s_n)/(p − 1), the p-adic valuation of n!.
pub fn legendre_lambda(n: u64, p: u32) -> u64 {
    (n - digit_sum(n, p)) / (p as u64 - 1)
}

/// Exponent e with |C(k,q)|_p = p^(−e).
pub fn binom_valuation_exponent(k: u64, q: u64, p: u32) -> Result<u64> {
    if q > k {
        return Err(Error::InvalidArgument(format!("q = {q} exceeds k = {k}")));
    }
    Ok((digit_sum(q, p) + digit_sum(k - q, p) - digit_sum(k, p)) / (p as u64 - 1))
}

/// |C(k,q)|_p as a norm value.
pub fn binom_valuation(k: u64, q: u64, p: u32) -> Result<Norm> {
    Ok(Norm::from_valuation(p, binom_valuation_exponent(k, q, p)? as i64))
}

/// Exponent of the unit group (ℤ/p^k)^*. For k = 0 the trivial group gives 1.
pub fn carmichael_exponent(p: u32, k: u32) -> u64 {
    if k == 0 {
        return 1;
    }
    let p = p as u64;
    if p == 2 {
        return match k {
            1 => 1,
            2 => 2,
            _ => 1 << (k - 2),
        };
    }
    p.pow(k - 1) * (p - 1)
}
