use super::series::{binom_padic, evaluate, forward_differences, MahlerSeries, Tail};
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::ultrametric::Lfe;

fn valuation_at_least(x: &Lfe, v: i64) -> bool {
    x.is_zero() || x.valuation().unwrap() >= v
}

/// Checks `f_0 = 0`, `|f_1 − 1| ≤ |p|` and `|f_j| ≤ |p|` for `j ≥ 2`.
pub fn check_admissible(f: &MahlerSeries) -> Result<()> {
    let one = Lfe::one(f.field(), f.precision());
    if !f.coeff(0).is_zero() {
        return Err(Error::SingularSystem("f_0 must vanish".into()));
    }
    if !valuation_at_least(&(&f.coeff(1) - &one), 1) {
        return Err(Error::SingularSystem("|f_1 - 1| must be at most |p|".into()));
    }
    if let Some(j) = (2..f.len()).find(|&j| !valuation_at_least(&f.coeff(j), 1)) {
        return Err(Error::SingularSystem(format!("|f_{j}| must be at most |p|")));
    }
    Ok(())
}

/// The matrix `M[k][n] = Δ^k C(f(x), n)|_0`, `0 ≤ k, n ≤ K`.
pub fn q_matrix(f: &MahlerSeries, k_max: usize) -> Result<Vec<Vec<Lfe>>> {
    let prec = f.precision();
    let images = (0..=k_max).map(|i| evaluate(f, &Lfe::from_int(f.field(), i as i64, prec))).collect::<Result<Vec<_>>>()?;
    let mut m = vec![Vec::with_capacity(k_max + 1); k_max + 1];
    for n in 0..=k_max {
        let col = images.iter().map(|y| binom_padic(y, n as u64)).collect::<Result<Vec<_>>>()?;
        for (k, d) in forward_differences(&col).into_iter().enumerate() {
            m[k].push(d);
        }
    }
    Ok(m)
}

/// Mahler coefficients `h_0..h_K` of `f^{-1}` from the truncated system `Σ_n h_n M[k][n] = δ_{k,1}`.
pub fn invert(f: &MahlerSeries, k_max: usize) -> Result<MahlerSeries> {
    check_admissible(f)?;
    let prec = f.precision();
    let m = q_matrix(f, k_max)?;
    let rhs = (0..=k_max).map(|k| Lfe::from_int(f.field(), (k == 1) as i64, prec)).collect();
    let h = solve(m, rhs)?;
    if let Some(j) = h.iter().position(|c| c.precision().is_some_and(|p| p <= 0)) {
        return Err(Error::PrecisionExhausted(format!("coefficient {j} of the inverse lost all digits")));
    }
    Ok(MahlerSeries::new(f.field(), h)?.with_tail(Tail::Unknown))
}

/// Largest `r` such that `s` agrees with the identity series modulo `p^r` on its first `len` coefficients.
pub fn identity_agreement(s: &MahlerSeries, len: usize) -> i64 {
    let field = s.field();
    let prec = s.precision();
    (0..len)
        .map(|j| {
            let d = &s.coeff(j) - &Lfe::from_int(field, (j == 1) as i64, prec);
            if d.is_zero() {
                d.precision().unwrap_or(i64::MAX)
            } else {
                d.valuation().unwrap()
            }
        })
        .min()
        .unwrap_or(i64::MAX)
}
