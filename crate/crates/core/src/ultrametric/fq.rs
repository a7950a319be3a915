//! Finite fields 𝔽_{p^u} as residue fields of the Laurent family.
//!
//! Elements are encoded as integers `Σ c_i p^i` where `c_i` is the
//! coefficient of `α^i` and `α` is a root of a primitive polynomial.
//! Multiplication goes through discrete log tables, which keeps every
//! operation table-driven for the small fields used here.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

#[derive(Debug)]
pub struct FqCtx {
    pub p: u32,
    pub u: u32,
    pub q: u32,
    /// Monic primitive modulus, coefficients low to high (length u + 1).
    pub modulus: Vec<u32>,
    log: Vec<u32>,
    exp: Vec<u32>,
}

static CACHE: Lazy<Mutex<HashMap<(u32, u32), Arc<FqCtx>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Returns the (cached) context for 𝔽_{p^u}.
pub fn ctx(p: u32, u: u32) -> Result<Arc<FqCtx>> {
    let mut cache = CACHE.lock().expect("fq cache poisoned");
    if let Some(c) = cache.get(&(p, u)) {
        return Ok(c.clone());
    }
    let c = Arc::new(FqCtx::build(p, u)?);
    cache.insert((p, u), c.clone());
    Ok(c)
}

fn to_digits(mut x: u32, p: u32, u: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(u as usize);
    for _ in 0..u {
        d.push(x % p);
        x /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

impl FqCtx {
    fn build(p: u32, u: u32) -> Result<Self> {
        if !crate::ultrametric::is_prime(p as u64) || u == 0 {
            return Err(Error::InvalidArgument(format!("bad field parameters p={p} u={u}")));
        }
        let q64 = (p as u64).checked_pow(u).filter(|&q| q <= MAX_FIELD_SIZE);
        let q = q64.ok_or_else(|| Error::BoundExceeded(format!("field size {p}^{u}")))? as u32;
        if u == 1 {
            let g = (1..p).find(|&g| mult_order_mod(g, p) == p - 1).unwrap_or(1);
            let mut exp = vec![0u32; (q - 1) as usize];
            let mut log = vec![0u32; q as usize];
            let mut x = 1u64;
            for i in 0..(q - 1) {
                exp[i as usize] = x as u32;
                log[x as usize] = i;
                x = x * g as u64 % p as u64;
            }
            return Ok(FqCtx { p, u, q, modulus: vec![p - g, 1], log, exp });
        }
        // Search monic polynomials of degree u for one whose root generates the unit group.
        for tail in 0..(q as u64) {
            let mut modulus = to_digits(tail as u32, p, u);
            modulus.push(1);
            if modulus[0] == 0 {
                continue;
            }
            if let Some((log, exp)) = Self::try_primitive(p, u, q, &modulus) {
                return Ok(FqCtx { p, u, q, modulus, log, exp });
            }
        }
        Err(Error::InvalidArgument(format!("no primitive polynomial found for {p}^{u}")))
    }

    fn try_primitive(p: u32, u: u32, q: u32, modulus: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = vec![0u32; u as usize];
        cur[0] = 1;
        for i in 0..(q - 1) {
            let code = from_digits(&cur, p);
            if log[code as usize] != u32::MAX {
                return None;
            }
            log[code as usize] = i;
            exp[i as usize] = code;
            // multiply by α: shift and reduce by the modulus
            let top = cur[(u - 1) as usize];
            for j in (1..u as usize).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for j in 0..u as usize {
                    cur[j] = (cur[j] + p * p - top * modulus[j] % p) % p;
                }
            }
        }
        if from_digits(&cur, p) != 1 {
            return None;
        }
        log[0] = 0;
        Some((log, exp))
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.u == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut scale) = (0u32, 1u32);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.u == 1 {
            return (self.p - a) % self.p;
        }
        let mut a = a;
        let (mut out, mut scale) = (0u32, 1u32);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * scale;
            a /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q as u64 - 1);
        self.exp[e as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let l = self.log[a as usize];
        Some(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }

    /// Embeds an integer through the prime subfield.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// Coefficient vector (low to high) of an element.
    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        to_digits(a, self.p, self.u)
    }

    pub fn from_coefficients(&self, c: &[u32]) -> u32 {
        from_digits(c, self.p)
    }
}

fn mult_order_mod(g: u32, p: u32) -> u32 {
    let (mut x, mut k) = (g as u64 % p as u64, 1u32);
    while x != 1 {
        x = x * g as u64 % p as u64;
        k += 1;
        if k > p {
            return 0;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small_fields() {
        for &(p, u) in &[(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 2)] {
            let f = ctx(p, u).unwrap();
            for a in 0..f.q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..f.q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in [0, 1, f.q - 1] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn characteristic_kills_p_copies() {
        let f = ctx(3, 2).unwrap();
        for a in 0..f.q {
            assert_eq!(f.add(a, f.add(a, a)), 0);
        }
    }
}
