use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::combinatorics::factorial;

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Calls `visit` with every `(l_0, …, l_d)` summing to `m`.
fn compositions(m: usize, parts: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(i: usize, rest: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if i + 1 == cur.len() {
            cur[i] = rest;
            visit(cur);
            return;
        }
        for v in 0..=rest {
            cur[i] = v;
            rec(i + 1, rest - v, cur, visit);
        }
    }
    if parts == 0 {
        if m == 0 {
            visit(&[]);
        }
        return;
    }
    let mut cur = vec![0; parts];
    rec(0, m, &mut cur, visit);
}

/// `g∘f` for power series given low to high, truncated to degree `n_max`, by the
/// multinomial expansion `f^m = Σ m!/(l_0!…l_d!) Π a_j^{l_j} x^{Σ j l_j}`.
pub fn analytic_compose(g: &[BigRational], f: &[BigRational], n_max: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n_max + 1];
    for (m, am) in g.iter().enumerate() {
        if am.is_zero() {
            continue;
        }
        let mf = factorial(m as u64);
        compositions(m, f.len(), &mut |l| {
            let deg: usize = l.iter().enumerate().map(|(j, &lj)| j * lj).sum();
            if deg > n_max {
                return;
            }
            let mut coef = BigRational::from_integer(mf.clone());
            for (j, &lj) in l.iter().enumerate() {
                if lj > 0 {
                    coef /= BigRational::from_integer(factorial(lj as u64));
                    coef *= num_traits::pow(f[j].clone(), lj);
                }
            }
            out[deg] += am * coef;
        });
    }
    trim(out)
}

/// Reference composition by Horner's rule with truncated polynomial products.
pub fn horner_compose(g: &[BigRational], f: &[BigRational], n_max: usize) -> Vec<BigRational> {
    let mut acc = vec![BigRational::zero(); n_max + 1];
    for c in g.iter().rev() {
        let mut next = vec![BigRational::zero(); n_max + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in f.iter().enumerate() {
                if i + j <= n_max {
                    next[i + j] += a * b;
                }
            }
        }
        next[0] += c;
        acc = next;
    }
    trim(acc)
}

pub fn ints(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect()
}

pub fn unit_monomial(n: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); n + 1];
    v[n] = BigRational::one();
    v
}
