//! Residue rings O/π^k O and the projections between them.

use num_traits::ToPrimitive;

use super::{fq, Family, FieldDescriptor, Lfe};
use crate::error::{Error, Result};

/// The finite ring O_K / π^k O_K. Elements are indexed by `Σ d_i q^i` over their
/// digits `d_0..d_{k-1}`, which for ℚ_p is the integer residue itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueRing {
    pub field: FieldDescriptor,
    pub level: u32,
}

impl ResidueRing {
    pub fn new(field: FieldDescriptor, level: u32) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("residue level must be at least 1".into()));
        }
        let r = ResidueRing { field, level };
        r.checked_cardinality()?;
        Ok(r)
    }

    fn checked_cardinality(&self) -> Result<u64> {
        self.field
            .q()
            .checked_pow(self.level)
            .filter(|&c| c <= 1 << 40)
            .ok_or_else(|| Error::BoundExceeded(format!("residue ring {}^{}", self.field.q(), self.level)))
    }

    pub fn cardinality(&self) -> u64 {
        self.field.q().pow(self.level)
    }

    pub fn digits(&self, x: u64) -> Vec<u32> {
        let q = self.field.q();
        let mut x = x;
        (0..self.level)
            .map(|_| {
                let d = (x % q) as u32;
                x /= q;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> u64 {
        let q = self.field.q();
        d.iter().take(self.level as usize).rev().fold(0u64, |acc, &c| acc * q + c as u64)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        match self.field.family {
            Family::Padic => (a + b) % self.cardinality(),
            Family::Laurent => {
                let f = fq::ctx(self.field.p, self.field.u).expect("valid field");
                let (da, db) = (self.digits(a), self.digits(b));
                let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| f.add(x, y)).collect();
                self.from_digits(&s)
            }
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        match self.field.family {
            Family::Padic => (self.cardinality() - a) % self.cardinality(),
            Family::Laurent => {
                let f = fq::ctx(self.field.p, self.field.u).expect("valid field");
                let s: Vec<u32> = self.digits(a).iter().map(|&x| f.neg(x)).collect();
                self.from_digits(&s)
            }
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match self.field.family {
            Family::Padic => ((a as u128 * b as u128) % self.cardinality() as u128) as u64,
            Family::Laurent => {
                let f = fq::ctx(self.field.p, self.field.u).expect("valid field");
                let (da, db) = (self.digits(a), self.digits(b));
                let n = self.level as usize;
                let mut c = vec![0u32; n];
                for i in 0..n {
                    for j in 0..(n - i) {
                        c[i + j] = f.add(c[i + j], f.mul(da[i], db[j]));
                    }
                }
                self.from_digits(&c)
            }
        }
    }

    pub fn one(&self) -> u64 {
        1
    }

    /// Lifts a residue to the canonical field element with digits d_0..d_{k-1}.
    pub fn lift(&self, x: u64, prec: i64) -> Lfe {
        match self.field.family {
            Family::Padic => Lfe::from_int(self.field, x as i64, prec),
            Family::Laurent => {
                let mut c = self.digits(x);
                c.resize(prec.max(self.level as i64) as usize, 0);
                Lfe::from_series(self.field, 0, c).with_precision_cap(prec)
            }
        }
    }
}

/// π_k: O_K → O_K/π^k, defined on elements of nonnegative valuation known mod π^k.
pub fn project(x: &Lfe, k: u32) -> Result<u64> {
    if let Some(prec) = x.precision() {
        if prec < k as i64 {
            return Err(Error::PrecisionExhausted(format!("project to level {k} needs precision {k}, have {prec}")));
        }
    }
    if !x.is_zero() && x.valuation().unwrap() < 0 {
        return Err(Error::InvalidArgument("projection of an element of negative valuation".into()));
    }
    let ring = ResidueRing { field: x.field(), level: k };
    match x.field().family {
        Family::Padic => Ok(x.residue_bigint(k as i64)?.to_u64().expect("residue fits")),
        Family::Laurent => Ok(ring.from_digits(&x.series_coeffs(k as i64)?)),
    }
}

/// A projection π^l_k between residue rings, or π_k from the field when `source` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionMap {
    pub field: FieldDescriptor,
    pub source: Option<u32>,
    pub target: u32,
}

impl ProjectionMap {
    pub fn between(field: FieldDescriptor, l: u32, k: u32) -> Result<Self> {
        if k > l || k == 0 {
            return Err(Error::InvalidArgument(format!("no projection from level {l} to {k}")));
        }
        Ok(ProjectionMap { field, source: Some(l), target: k })
    }

    pub fn from_field(field: FieldDescriptor, k: u32) -> Self {
        ProjectionMap { field, source: None, target: k }
    }

    /// π^l_k on residue indices.
    pub fn apply_residue(&self, x: u64) -> u64 {
        self.field.q().checked_pow(self.target).map_or(x, |m| x % m)
    }

    pub fn apply(&self, x: &Lfe) -> Result<u64> {
        project(x, self.target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn projection_examples() {
        let f = FieldDescriptor::padic(2).unwrap();
        assert_eq!(project(&Lfe::from_int(f, 5, 8), 1).unwrap(), 1);
        assert_eq!(project(&Lfe::from_int(f, 4, 8), 2).unwrap(), 0);
        assert!(project(&Lfe::from_int(f, 4, 1), 2).is_err());
    }

    #[test]
    fn tower_compatibility_random() {
        let f = FieldDescriptor::padic(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = Lfe::from_int(f, rng.gen_range(0..1_000_000), 16);
            for k in 1..=6 {
                let pk = ProjectionMap::between(f, k, 1).unwrap();
                assert_eq!(pk.apply_residue(project(&x, k).unwrap()), project(&x, 1).unwrap());
            }
        }
    }

    #[test]
    fn projection_is_ring_homomorphism() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for field in [FieldDescriptor::padic(5).unwrap(), FieldDescriptor::laurent(2, 2).unwrap()] {
            let ring = ResidueRing::new(field, 3).unwrap();
            for _ in 0..100 {
                let a = ring.lift(rng.gen_range(0..ring.cardinality()), 10);
                let b = ring.lift(rng.gen_range(0..ring.cardinality()), 10);
                let (pa, pb) = (project(&a, 3).unwrap(), project(&b, 3).unwrap());
                assert_eq!(project(&(&a * &b), 3).unwrap(), ring.mul(pa, pb));
                assert_eq!(project(&(&a + &b), 3).unwrap(), ring.add(pa, pb));
            }
        }
    }

    #[test]
    fn ring_cardinalities() {
        assert_eq!(ResidueRing::new(FieldDescriptor::padic(3).unwrap(), 2).unwrap().cardinality(), 9);
        assert_eq!(ResidueRing::new(FieldDescriptor::laurent(2, 3).unwrap(), 2).unwrap().cardinality(), 64);
    }
}
