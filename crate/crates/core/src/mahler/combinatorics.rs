//! Exact combinatorial coefficients: Stirling-type tables S and T, the Ω coefficients
//! and their generating function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::MPoly;

/// Largest table size accepted by [`stirling_tables`].
pub const MAX_TABLE: usize = 64;
/// Largest `k` and `n` accepted by [`omega`].
pub const MAX_OMEGA: usize = 8;

/// Exact binomial coefficient, zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Elementary symmetric polynomials `α_0..α_m` of `z_1..z_m`.
pub fn elementary_symmetric(z: &[BigInt]) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); z.len() + 1];
    e[0] = BigInt::one();
    for (i, zi) in z.iter().enumerate() {
        for l in (1..=i + 1).rev() {
            let add = &e[l - 1] * zi;
            e[l] += add;
        }
    }
    e
}

/// The matrices `S` (binomial basis in monomials) and `T` (monomials in the binomial basis).
#[derive(Clone, Debug)]
pub struct StirlingTables {
    pub size: usize,
    /// `C(x, m) = Σ_l S[m][l] x^l`.
    pub s: Vec<Vec<BigRational>>,
    /// `T[n][k] = (Δ^k x^n)|_{x=0}`, so `x^n = Σ_k T[n][k] C(x, k)`.
    pub t: Vec<Vec<BigInt>>,
}

/// `T_{n,k}` by the nested binomial sum: `T_{n,k} = Σ_{l<n} C(n,l) T_{l,k−1}`,
/// where the innermost index stops at 1 because only the constant term survives at 0.
fn t_nested(size: usize) -> Vec<Vec<BigInt>> {
    let mut t = vec![vec![BigInt::zero(); size + 1]; size + 1];
    t[0][0] = BigInt::one();
    for n in 1..=size {
        t[n][1] = BigInt::one();
        for k in 2..=n {
            let mut acc = BigInt::zero();
            for l in 1..n {
                if !t[l][k - 1].is_zero() {
                    acc += binomial(n as i64, l as i64) * &t[l][k - 1];
                }
            }
            t[n][k] = acc;
        }
    }
    t
}

/// `T_{n,k}` from the explicit forward difference `Σ_i (−1)^{k−i} C(k,i) i^n`.
pub fn t_direct(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..=k {
        let term = binomial(k as i64, i as i64) * BigInt::from(i).pow(n as u32);
        if (k - i) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

pub fn stirling_tables(size: usize) -> Result<StirlingTables> {
    if size > MAX_TABLE {
        return Err(Error::BoundExceeded(format!("table size {size} > {MAX_TABLE}")));
    }
    let t = t_nested(size);
    for (n, row) in t.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            if *v != t_direct(n, k) {
                return Err(Error::Mismatch(format!("T[{n}][{k}] nested sum disagrees with Δ^k x^n")));
            }
        }
    }
    let mut s = vec![vec![BigRational::zero(); size + 1]; size + 1];
    for m in 0..=size {
        let z: Vec<BigInt> = (1..m as i64).map(BigInt::from).collect();
        let alpha = elementary_symmetric(&z);
        let mf = factorial(m as u64);
        for (l, a) in alpha.iter().enumerate() {
            let signed = if l % 2 == 0 { a.clone() } else { -a.clone() };
            s[m][m - l] = BigRational::new(signed, mf.clone());
        }
    }
    Ok(StirlingTables { size, s, t })
}

impl StirlingTables {
    /// Checks `S·T = I` and `T·S = I` exactly; returns the first failing index pair.
    pub fn verify_inverse(&self) -> std::result::Result<(), (usize, usize)> {
        let n = self.size;
        for m in 0..=n {
            for j in 0..=n {
                let delta = if m == j { BigRational::one() } else { BigRational::zero() };
                let st: BigRational = (0..=n).map(|l| &self.s[m][l] * BigRational::from_integer(self.t[l][j].clone())).sum();
                let ts: BigRational = (0..=n).map(|l| BigRational::from_integer(self.t[m][l].clone()) * &self.s[l][j]).sum();
                if st != delta || ts != delta {
                    return Err((m, j));
                }
            }
        }
        Ok(())
    }

    /// CSV with a header row; `kind` is `S` or `T`.
    pub fn to_csv(&self, kind: char) -> String {
        let n = self.size;
        let head: Vec<String> = (0..=n).map(|j| format!("{kind}_{{i,{j}}}")).collect();
        let mut out = format!("i,{}\n", head.join(","));
        for i in 0..=n {
            let row: Vec<String> = (0..=n).map(|j| if kind == 'S' { self.s[i][j].to_string() } else { self.t[i][j].to_string() }).collect();
            out.push_str(&format!("{i},{}\n", row.join(",")));
        }
        out
    }
}

fn check_omega_bounds(k: usize, m: &[usize]) -> Result<()> {
    let n = m.len();
    if n == 0 || k > MAX_OMEGA || n > MAX_OMEGA || m.iter().any(|&mi| mi > k) {
        return Err(Error::BoundExceeded(format!("omega k={k} n={n} m={m:?}")));
    }
    Ok(())
}

/// `Ω^{k,n}_{m_1..m_n}` by the nested sum over `l_1 + … + l_{n−1} = k − m_n`.
///
/// For `n = 1` the constraint has no variables; its single empty assignment counts
/// exactly when `m_1 = k`.
pub fn omega(k: usize, m: &[usize]) -> Result<BigInt> {
    check_omega_bounds(k, m)?;
    let n = m.len();
    let target = k as i64 - m[n - 1] as i64;
    let mut total = BigInt::zero();
    let mut l = vec![0i64; n - 1];
    fn rec(i: usize, rest: i64, k: i64, m: &[usize], l: &mut Vec<i64>, total: &mut BigInt) {
        let n1 = l.len();
        if i == n1 {
            if rest != 0 {
                return;
            }
            let mut prod = BigInt::one();
            let mut used = 0i64;
            for j in 0..n1 {
                prod *= binomial(k - used, l[j]);
                used += l[j];
                prod *= binomial(k - used, m[j] as i64 - l[j]);
                if prod.is_zero() {
                    return;
                }
            }
            *total += prod;
            return;
        }
        for v in 0..=rest {
            l[i] = v;
            rec(i + 1, rest - v, k, m, l, total);
        }
    }
    if target >= 0 {
        rec(0, target, k as i64, m, &mut l, &mut total);
    }
    Ok(total)
}

/// Generating polynomial in `x_1..x_{n−1}` whose coefficient of `x^m` is
/// `Ω^{k,n}_{m_1..m_{n−1}, m_n}`: `C(k, m_n) · P^{m_n} (P − 1)^{k − m_n}` with `P = Π (1 + x_i)`.
pub fn omega_generating(k: usize, n: usize, m_last: usize) -> MPoly<BigRational> {
    let vars = n - 1;
    let one = BigRational::one();
    let mut p = MPoly::constant(one.clone(), vars);
    for i in 0..vars {
        let f = MPoly::constant(one.clone(), vars).plus(&MPoly::var(i, vars, one.clone()));
        p = p.times(&f);
    }
    if m_last > k {
        return MPoly::zero(vars);
    }
    let pm1 = p.minus(&MPoly::constant(one.clone(), vars));
    let c = BigRational::from_integer(binomial(k as i64, m_last as i64));
    p.pow(m_last as u32, &one).times(&pm1.pow((k - m_last) as u32, &one)).scale(&c)
}

/// Ω read off the generating polynomial.
pub fn omega_from_generating(k: usize, m: &[usize]) -> BigInt {
    let n = m.len();
    let g = omega_generating(k, n, m[n - 1]);
    let mono: Vec<u32> = m[..n - 1].iter().map(|&x| x as u32).collect();
    g.coeff(&mono).map(|c| c.to_integer()).unwrap_or_else(BigInt::zero)
}

/// Both sides of the two-index binomial identity
/// `Σ_{l₁,l₂} C(k−l₁,m₁−l₁) C(k−l₁−l₂,m₂−l₂) C(k,l₁) C(k−l₁,l₂) = C(k,m₁) Σ_{l₁} C(m₁,l₁) C(k−l₁,m₂) 2^{m₂}`.
pub fn two_index_identity(k: i64, m1: i64, m2: i64) -> (BigInt, BigInt) {
    let mut lhs = BigInt::zero();
    for l1 in 0..=k {
        for l2 in 0..=k {
            lhs += binomial(k - l1, m1 - l1) * binomial(k - l1 - l2, m2 - l2) * binomial(k, l1) * binomial(k - l1, l2);
        }
    }
    let inner: BigInt = (0..=k).map(|l1| binomial(m1, l1) * binomial(k - l1, m2)).sum();
    let rhs = binomial(k, m1) * inner * BigInt::from(2).pow(m2 as u32);
    (lhs, rhs)
}

/// Signed rendering used by CSV output.
pub fn signed_str(x: &BigInt) -> String {
    if x.is_negative() {
        format!("-{}", x.abs())
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_table_entries() {
        let t = stirling_tables(4).unwrap();
        assert_eq!(t.s[2][1], q(-1, 2));
        assert_eq!(t.s[2][2], q(1, 2));
        assert_eq!(t.t[1][1], BigInt::from(1));
        assert_eq!(t.t[1][0], BigInt::from(0));
        assert_eq!(t.t[3][2], BigInt::from(6));
        let st21: BigRational = (0..=4).map(|l| &t.s[2][l] * BigRational::from_integer(t.t[l][1].clone())).sum();
        let st22: BigRational = (0..=4).map(|l| &t.s[2][l] * BigRational::from_integer(t.t[l][2].clone())).sum();
        assert_eq!(st21, q(0, 1));
        assert_eq!(st22, q(1, 1));
    }

    #[test]
    fn tables_are_mutually_inverse() {
        assert_eq!(stirling_tables(20).unwrap().verify_inverse(), Ok(()));
    }

    #[test]
    fn t_matches_surjection_count() {
        // T_{n,k} counts surjections of an n-set onto a k-set.
        fn surjections(n: usize, k: usize) -> u64 {
            if k == 0 {
                return (n == 0) as u64;
            }
            let total = (k as u64).pow(n as u32);
            let mut count = 0;
            for code in 0..total {
                let mut seen = vec![false; k];
                let mut c = code;
                for _ in 0..n {
                    seen[(c % k as u64) as usize] = true;
                    c /= k as u64;
                }
                count += seen.iter().all(|&b| b) as u64;
            }
            count
        }
        let t = stirling_tables(6).unwrap();
        for n in 0..=6 {
            for k in 0..=6 {
                assert_eq!(t.t[n][k], BigInt::from(surjections(n, k)), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn omega_single_factor_convention() {
        assert_eq!(omega(1, &[1]).unwrap(), BigInt::from(1));
        assert_eq!(omega(3, &[3]).unwrap(), BigInt::from(1));
        assert_eq!(omega(3, &[2]).unwrap(), BigInt::from(0));
    }

    #[test]
    fn omega_matches_generating_function() {
        for k in 0..=4 {
            for n in 1..=3 {
                let mut m = vec![0usize; n];
                loop {
                    assert_eq!(omega(k, &m).unwrap(), omega_from_generating(k, &m), "k={k} m={m:?}");
                    let mut i = 0;
                    while i < n && m[i] == k {
                        m[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                    m[i] += 1;
                }
            }
        }
    }

    #[test]
    fn two_index_identity_holds() {
        for k in 0..=6 {
            for m1 in 0..=6 {
                for m2 in 0..=6 {
                    let (l, r) = two_index_identity(k, m1, m2);
                    assert_eq!(l, r, "k={k} m1={m1} m2={m2}");
                }
            }
        }
    }

    #[test]
    fn omega_bounds() {
        assert!(matches!(omega(9, &[1]), Err(Error::BoundExceeded(_))));
        assert!(matches!(omega(2, &[3, 0]), Err(Error::BoundExceeded(_))));
    }
}
