use once_cell::sync::Lazy;

use super::diff::LevelPermutation;
use super::perm::Perm;
use crate::error::{Error, Result};

/// A pair `(x, y)` in `S_5` with `[x, y] = (0 1 2)`.
static BASE_PAIR: Lazy<(Perm, Perm)> = Lazy::new(|| {
    let target = Perm::from_cycles(5, &[vec![0, 1, 2]]).expect("3-cycle");
    let all = permutations(5);
    for x in &all {
        for y in &all {
            if Perm::commutator(x, y) == target {
                return (x.clone(), y.clone());
            }
        }
    }
    unreachable!("every 3-cycle in S_5 is a commutator")
});

fn permutations(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..n as u32).collect();
    heap_permute(n, &mut cur, &mut out);
    out
}

fn heap_permute(k: usize, cur: &mut Vec<u32>, out: &mut Vec<Perm>) {
    if k <= 1 {
        out.push(Perm::from_images(cur.clone()).expect("permutation"));
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, cur, out);
        let j = if k % 2 == 0 { i } else { 0 };
        cur.swap(j, k - 1);
    }
}

fn embed(p: &Perm, n: usize) -> Perm {
    let mut images: Vec<u32> = (0..n as u32).collect();
    images[..p.len()].copy_from_slice(p.images());
    Perm::from_images(images).expect("embedded permutation")
}

/// A permutation of `{0..n−1}` sending `0, 1, 2, 3, 4` to `a, b, c` followed by two other points.
fn relabel(n: usize, abc: [u32; 3]) -> Perm {
    let mut front: Vec<u32> = abc.to_vec();
    front.extend((0..n as u32).filter(|i| !abc.contains(i)));
    Perm::from_images(front).expect("relabeling")
}

/// `(a b c)` as a commutator of permutations of `{0..n−1}`, `n ≥ 5`.
pub fn three_cycle_commutator(n: usize, abc: [u32; 3]) -> (Perm, Perm) {
    let (x, y) = &*BASE_PAIR;
    let psi = relabel(n, abc);
    (embed(x, n).conjugate_by(&psi), embed(y, n).conjugate_by(&psi))
}

/// Writes `σ` as a product of 3-cycles `c_1 ∘ c_2 ∘ …`.
pub fn three_cycles(sigma: &Perm) -> Result<Vec<[u32; 3]>> {
    if !sigma.is_even() {
        return Err(Error::OddParity);
    }
    let n = sigma.len();
    let transpositions: Vec<(u32, u32)> =
        sigma.cycles().iter().flat_map(|c| c.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>()).collect();
    let mut out = Vec::new();
    for pair in transpositions.chunks(2) {
        let [(a, b), (c, d)] = [pair[0], pair[1]];
        let q = Perm::transposition(n, a, b).compose(&Perm::transposition(n, c, d));
        let cs = q.cycles();
        match cs.as_slice() {
            [] => {}
            [c3] if c3.len() == 3 => out.push([c3[0], c3[1], c3[2]]),
            _ => {
                out.push([a, b, c]);
                out.push([b, c, d]);
            }
        }
    }
    Ok(out)
}

/// Commutator pairs `(a_i, b_i)` with `σ = [a_1, b_1] ∘ [a_2, b_2] ∘ …` for an even `σ ∈ S_n`, `n ≥ 5`.
pub fn commutator_decompose(sigma: &Perm) -> Result<Vec<(Perm, Perm)>> {
    let n = sigma.len();
    if n < 5 {
        return Err(Error::TooSmall(n));
    }
    let pairs: Vec<(Perm, Perm)> = three_cycles(sigma)?.into_iter().map(|abc| three_cycle_commutator(n, abc)).collect();
    if commutator_product(n, &pairs) != *sigma {
        return Err(Error::Mismatch(format!("commutator product does not reproduce {sigma}")));
    }
    Ok(pairs)
}

pub fn commutator_product(n: usize, pairs: &[(Perm, Perm)]) -> Perm {
    pairs.iter().fold(Perm::identity(n), |acc, (a, b)| acc.compose(&Perm::commutator(a, b)))
}

/// [`commutator_decompose`] for the permutation a map induces on `M_k`.
pub fn commutator_decompose_even(sigma: &LevelPermutation) -> Result<Vec<(LevelPermutation, LevelPermutation)>> {
    let wrap = |p: Perm| LevelPermutation { perm: p, basepoint: None, ..sigma.clone() };
    Ok(commutator_decompose(&sigma.perm)?.into_iter().map(|(a, b)| (wrap(a), wrap(b))).collect())
}
