//! Seeded generators for the fixtures used by the verification suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{FnRepr, PhiPoint, UpsilonPoint};
use crate::poly::MPoly;
use crate::ultrametric::{FieldDescriptor, Lfe};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Element of ℤ_p (or 𝔽_q[[θ]]) with `prec` random digits.
pub fn integer(rng: &mut FixtureRng, field: FieldDescriptor, prec: i64) -> Lfe {
    let q = field.q() as u32;
    let coeffs: Vec<u32> = (0..prec).map(|_| rng.gen_range(0..q)).collect();
    match field.family {
        crate::ultrametric::Family::Laurent => Lfe::from_series(field, 0, coeffs),
        crate::ultrametric::Family::Padic => {
            let mut acc = num_bigint::BigInt::from(0);
            for &c in coeffs.iter().rev() {
                acc = acc * field.p + c;
            }
            Lfe::from_bigint(field, &acc, prec)
        }
    }
}

/// Random unit: nonzero leading digit.
pub fn unit(rng: &mut FixtureRng, field: FieldDescriptor, prec: i64) -> Lfe {
    loop {
        let x = integer(rng, field, prec);
        if x.is_unit() {
            return x;
        }
    }
}

/// Random element of valuation at least 1.
pub fn small(rng: &mut FixtureRng, field: FieldDescriptor, prec: i64) -> Lfe {
    integer(rng, field, prec - 1).shift(1)
}

/// Random polynomial in `m` variables of total degree at most `deg` with coefficients in `[−9, 9]`.
pub fn polynomial(rng: &mut FixtureRng, field: FieldDescriptor, m: usize, deg: u32, prec: i64) -> MPoly<Lfe> {
    let mut p = MPoly::zero(m);
    let mut exps = vec![0u32; m];
    loop {
        if exps.iter().sum::<u32>() <= deg && rng.gen_bool(0.7) {
            p.add_term(exps.clone(), Lfe::from_int(field, rng.gen_range(-9..=9), prec));
        }
        let mut i = 0;
        while i < m && exps[i] == deg {
            exps[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
        exps[i] += 1;
    }
    p
}

pub fn scalar_poly_fn(rng: &mut FixtureRng, field: FieldDescriptor, m: usize, deg: u32, prec: i64) -> FnRepr {
    FnRepr::scalar_poly(field, polynomial(rng, field, m, deg, prec))
}

/// Φ-point with integral base point and directions and unit scalars.
pub fn phi_point(rng: &mut FixtureRng, field: FieldDescriptor, m: usize, n: usize, prec: i64) -> PhiPoint {
    let x = (0..m).map(|_| integer(rng, field, prec)).collect();
    let v = (0..n).map(|_| (0..m).map(|_| integer(rng, field, prec)).collect()).collect();
    let t = (0..n).map(|_| unit(rng, field, prec)).collect();
    PhiPoint::new(x, v, t).expect("consistent shape")
}

/// Υ-point of level `n` whose own scalars are units and whose direction subtrees carry
/// scalars of positive valuation, so that every scalar met during evaluation is a unit.
pub fn upsilon_point(rng: &mut FixtureRng, field: FieldDescriptor, m: usize, n: usize, prec: i64) -> UpsilonPoint {
    fn build(rng: &mut FixtureRng, field: FieldDescriptor, m: usize, n: usize, prec: i64, main: bool) -> UpsilonPoint {
        if n == 0 {
            return UpsilonPoint::Base((0..m).map(|_| integer(rng, field, prec)).collect());
        }
        let base = build(rng, field, m, n - 1, prec, main);
        let dir = build(rng, field, m, n - 1, prec, false);
        let t = if main { unit(rng, field, prec) } else { small(rng, field, prec) };
        UpsilonPoint::step(base, dir, t).expect("consistent shape")
    }
    build(rng, field, m, n, prec, true)
}

/// `x + p·c(x)` on ℤ_p with `c` of degree `deg` and coefficients in `[−9, 9]`: a bijective
/// isometry with `‖g − id‖ ≤ |p|`.
pub fn near_identity(rng: &mut FixtureRng, field: FieldDescriptor, deg: usize, prec: i64) -> crate::tower::DiffRepr {
    let p = field.p as i64;
    let mut coeffs: Vec<i64> = (0..=deg).map(|_| p * rng.gen_range(-9..=9)).collect();
    coeffs[1] += 1;
    crate::tower::DiffRepr::poly_ints(field, &coeffs, 1, prec).expect("self-map of ℤ_p")
}
