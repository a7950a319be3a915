use serde::Serialize;

use super::group::LoopGroupElement;
use super::monoid::PinnedMap;
use crate::error::{Error, Result};
use crate::ultrametric::Norm;

/// `|π|^j` with `j` the first index where the sequences differ, `0` when they agree; a length
/// difference counts as a difference at the shorter length.
pub fn baire_distance<T: PartialEq>(f: &[T], g: &[T], p: u32) -> Norm {
    match f.iter().zip(g).position(|(a, b)| a != b) {
        Some(j) => Norm::from_valuation(p, j as i64),
        None if f.len() == g.len() => Norm::zero(p),
        None => Norm::from_valuation(p, f.len().min(g.len()) as i64),
    }
}

/// Push-forward of a group element along a pointed map `N_l → N_k` given as a value table.
pub fn push_forward(x: &LoopGroupElement, map: &[usize], target_n: usize, target_y0: usize) -> Result<LoopGroupElement> {
    if map.len() != x.n || map.iter().any(|&v| v >= target_n) {
        return Err(Error::ShapeMismatch(format!("connecting map {map:?} is not a map N_l → N_k")));
    }
    if map[x.y0] != target_y0 {
        return Err(Error::BasepointViolated("connecting map must send basepoint to basepoint".into()));
    }
    let mut out = LoopGroupElement::zero(target_n, target_y0);
    for (i, &c) in x.coords.iter().enumerate() {
        let v = map[x.value(i)];
        if v != target_y0 {
            let j = out.slot(v);
            out.coords[j] += c;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopThreadReport {
    pub levels: usize,
    pub compatible: bool,
    /// For each level and coordinate, the first `digits` base-`p` digits of the coordinate in `ℤ_p`.
    pub coordinates: Vec<Vec<Vec<u32>>>,
}

/// Base-`p` digits of an integer viewed in `ℤ_p` (two's-complement style for negatives).
pub fn padic_digits(c: i64, p: u32, digits: usize) -> Vec<u32> {
    let p = p as i128;
    let mut x = c as i128;
    (0..digits)
        .map(|_| {
            let d = x.rem_euclid(p);
            x = (x - d) / p;
            d as u32
        })
        .collect()
}

/// Checks that level `i + 1` pushes forward to level `i` along `maps[i]` and emits digit
/// streams of every coordinate.
pub fn loop_thread_check(levels: &[LoopGroupElement], maps: &[Vec<usize>], p: u32, digits: usize) -> Result<LoopThreadReport> {
    if maps.len() + 1 != levels.len() {
        return Err(Error::ShapeMismatch(format!("{} levels need {} connecting maps", levels.len(), levels.len().saturating_sub(1))));
    }
    for (i, map) in maps.iter().enumerate() {
        let (lo, hi) = (&levels[i], &levels[i + 1]);
        let pushed = push_forward(hi, map, lo.n, lo.y0)?;
        if let Some(j) = (0..lo.coords.len()).find(|&j| pushed.coords[j] != lo.coords[j]) {
            return Err(Error::Incompatible(format!(
                "level {}: coordinate of value {} is {} but the level above pushes forward to {}",
                i,
                lo.value(j),
                lo.coords[j],
                pushed.coords[j]
            )));
        }
    }
    let coordinates = levels.iter().map(|l| l.coords.iter().map(|&c| padic_digits(c, p, digits)).collect()).collect();
    Ok(LoopThreadReport { levels: levels.len(), compatible: true, coordinates })
}

/// The level-`k` map `x ↦ f(x) mod p^k` of a family `f: M → ℤ` with `f(s₀) ≡ 0`, as a pinned
/// map into `ℤ/p^k` with basepoint `0`.
pub fn project_family(values: &[i64], s0: usize, p: u32, k: u32) -> Result<PinnedMap> {
    let q = (p as i64).pow(k);
    PinnedMap::new(values.iter().map(|v| v.rem_euclid(q) as usize).collect(), s0, q as usize, 0)
}

/// Reduction `ℤ/p^{k+1} → ℤ/p^k` as a value table.
pub fn reduction_map(p: u32, k: u32) -> Vec<usize> {
    let q = (p as usize).pow(k);
    (0..q * p as usize).map(|v| v % q).collect()
}
