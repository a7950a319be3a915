//! Gaussian elimination over truncated local fields with valuation pivoting.

use crate::error::{Error, Result};
use crate::ultrametric::Lfe;

fn pivot_valuation(x: &Lfe) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        x.valuation()
    }
}

/// Solves `A y = b` for square `A`, choosing at each step the entry of least valuation.
pub fn solve(mut a: Vec<Vec<Lfe>>, mut b: Vec<Lfe>) -> Result<Vec<Lfe>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(Error::ShapeMismatch("square system expected".into()));
    }
    let mut cols: Vec<usize> = (0..n).collect();
    for step in 0..n {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(step) {
            for j in step..n {
                if let Some(v) = pivot_valuation(&row[cols[j]]) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (_, pi, pj) = best.ok_or_else(|| Error::SingularSystem(format!("no usable pivot at step {step}")))?;
        a.swap(step, pi);
        b.swap(step, pi);
        cols.swap(step, pj);
        let pc = cols[step];
        let piv = a[step][pc].clone();
        for i in step + 1..n {
            if a[i][pc].is_exact_zero() {
                continue;
            }
            let factor = a[i][pc].checked_div(&piv)?;
            for j in step..n {
                let c = cols[j];
                let sub = &factor * &a[step][c];
                a[i][c] = &a[i][c] - &sub;
            }
            let sub = &factor * &b[step];
            b[i] = &b[i] - &sub;
        }
    }
    let mut y = vec![Lfe::zero(b[0].field()); n];
    for step in (0..n).rev() {
        let pc = cols[step];
        let mut acc = b[step].clone();
        for j in step + 1..n {
            let c = cols[j];
            acc = &acc - &(&a[step][c] * &y[c]);
        }
        y[pc] = acc.checked_div(&a[step][pc])?;
    }
    Ok(y)
}

/// Rank of a matrix, accepting a pivot only when its valuation is below `threshold`.
pub fn rank(mut a: Vec<Vec<Lfe>>, threshold: i64) -> Result<usize> {
    let rows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    let mut used_cols = vec![false; ncols];
    while r < rows {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, x) in row.iter().enumerate() {
                if used_cols[j] {
                    continue;
                }
                if let Some(v) = pivot_valuation(x) {
                    if v < threshold && best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        a.swap(r, pi);
        used_cols[pj] = true;
        let piv = a[r][pj].clone();
        for i in r + 1..rows {
            if a[i][pj].is_zero() {
                continue;
            }
            let factor = a[i][pj].checked_div(&piv)?;
            for j in 0..ncols {
                let sub = &factor * &a[r][j];
                a[i][j] = &a[i][j] - &sub;
            }
        }
        r += 1;
    }
    Ok(r)
}
