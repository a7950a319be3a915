use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::perm::Perm;
use crate::calculus::{Ball, Domain, FnRepr};
use crate::error::{Error, Result};
use crate::mahler::MahlerSeries;
use crate::poly::MPoly;
use crate::ultrametric::{project, FieldDescriptor, Lfe, ResidueRing};

/// A map `g: M → M` on a finite union of disjoint balls of `O_K^n`, with claimed bound
/// `‖g − id‖ ≤ |π|^s`.
#[derive(Clone, Debug)]
pub struct DiffRepr {
    pub map: FnRepr,
    pub balls: Vec<Ball>,
    pub s: i64,
    pub prec: i64,
}

impl DiffRepr {
    pub fn new(map: FnRepr, balls: Vec<Ball>, s: i64, prec: i64) -> Result<Self> {
        if map.in_dim() != map.out_dim {
            return Err(Error::ShapeMismatch(format!("map K^{} → K^{} is not a self-map", map.in_dim(), map.out_dim)));
        }
        if balls.is_empty() || balls.iter().any(|b| b.center.len() != map.in_dim() || b.radius_exp < 0) {
            return Err(Error::InvalidArgument("domain must be a nonempty union of balls inside O_K^n".into()));
        }
        Ok(DiffRepr { map, balls, s, prec })
    }

    pub fn field(&self) -> FieldDescriptor {
        self.map.field
    }

    pub fn dim(&self) -> usize {
        self.map.in_dim()
    }

    /// A self-map of `O_K^n`.
    pub fn on_integers(map: FnRepr, s: i64, prec: i64) -> Result<Self> {
        let ball = Ball::new(vec![Lfe::zero_mod(map.field, prec); map.in_dim()], 0);
        Self::new(map, vec![ball], s, prec)
    }

    /// A self-map of the units of `ℤ_p`.
    pub fn on_units(map: FnRepr, s: i64, prec: i64) -> Result<Self> {
        let Domain::Balls { balls, .. } = Domain::units(map.field, prec) else { unreachable!() };
        Self::new(map, balls, s, prec)
    }

    /// The polynomial `Σ c_i x^i` on `O_K`.
    pub fn poly_ints(field: FieldDescriptor, coeffs: &[i64], s: i64, prec: i64) -> Result<Self> {
        let poly = MPoly::from_terms(
            1,
            coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (vec![i as u32], Lfe::from_int(field, c, prec))),
        );
        Self::on_integers(FnRepr::scalar_poly(field, poly), s, prec)
    }

    pub fn identity(field: FieldDescriptor, dim: usize, prec: i64) -> Self {
        Self::on_integers(FnRepr::identity(field, Domain::whole(dim), prec), prec, prec).expect("identity is a self-map")
    }

    /// `x ↦ x + c` on `O_K^n`.
    pub fn shift(field: FieldDescriptor, c: &[Lfe], prec: i64) -> Self {
        let n = c.len();
        let one = Lfe::one(field, prec);
        let polys = (0..n).map(|i| MPoly::var(i, n, one.clone()).plus(&MPoly::constant(c[i].clone(), n))).collect();
        let s = c.iter().filter(|x| !x.is_zero()).map(|x| x.valuation().unwrap()).min().unwrap_or(prec);
        Self::on_integers(FnRepr::polynomial(field, Domain::whole(n), polys), s, prec).expect("shift is a self-map")
    }

    pub fn from_mahler(series: MahlerSeries, s: i64) -> Self {
        let prec = series.precision();
        Self::on_integers(FnRepr::mahler(series.field(), vec![series]), s, prec).expect("scalar series")
    }

    pub fn eval(&self, x: &[Lfe]) -> Result<Vec<Lfe>> {
        self.map.eval(x)
    }

    /// `self ∘ other` on the domain of `other`.
    pub fn compose(&self, other: &DiffRepr) -> DiffRepr {
        DiffRepr { map: self.map.compose(&other.map), balls: other.balls.clone(), s: self.s.min(other.s), prec: self.prec.min(other.prec) }
    }

    /// Pointwise inverse by the fixed-point iteration `y ← x − (g(y) − y)`, which converges
    /// when `g − id` is a contraction; every result is checked by re-applying `g`.
    pub fn inverse(&self) -> DiffRepr {
        let g = self.map.clone();
        let prec = self.prec;
        let f = move |x: &[Lfe]| -> Result<Vec<Lfe>> {
            let mut y = x.to_vec();
            for _ in 0..=2 * prec + 2 {
                let gy = g.eval(&y)?;
                let resid: Vec<Lfe> = gy.iter().zip(x).map(|(a, b)| a - b).collect();
                if resid.iter().all(|r| r.is_zero()) {
                    return Ok(y);
                }
                y = y.iter().zip(&resid).map(|(a, r)| a - r).collect();
            }
            Err(Error::InversionFailed("fixed-point iteration did not converge".into()))
        };
        let map = FnRepr::opaque(self.map.field, self.map.domain.clone(), self.dim(), self.map.class, Arc::new(f));
        DiffRepr { map, balls: self.balls.clone(), s: self.s, prec: self.prec }
    }

    /// Classes of `M` modulo `π^k`, in increasing residue-index order.
    pub fn residue_classes(&self, k: u32) -> Result<Vec<Vec<u64>>> {
        let ring = ResidueRing::new(self.field(), k)?;
        let mut out = Vec::new();
        for b in &self.balls {
            if b.radius_exp > k as i64 {
                return Err(Error::InvalidArgument(format!("ball of radius |π|^{} is finer than level {k}", b.radius_exp)));
            }
            let r = b.radius_exp as u32;
            let center: Vec<u64> = b.center.iter().map(|c| if r == 0 { Ok(0) } else { project(c, r) }).collect::<Result<_>>()?;
            let qr = self.field().q().pow(r);
            let free = ring.cardinality() / qr;
            let n = center.len();
            let total = free.pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let pt: Vec<u64> = center
                    .iter()
                    .map(|&x0| {
                        let y = c % free;
                        c /= free;
                        x0 + qr * y
                    })
                    .collect();
                out.push(pt);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// How many representatives of each residue class are tried by [`level_project`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Representatives(usize),
    /// Every value of the next digit.
    Exhaustive,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Representatives(2)
    }
}

/// The permutation `g_k` of `M_k` induced by `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPermutation {
    pub field: FieldDescriptor,
    pub level: u32,
    /// Elements of `M_k` as residue indices per coordinate, in enumeration order.
    pub points: Vec<Vec<u64>>,
    pub perm: Perm,
    pub basepoint: Option<usize>,
}

impl LevelPermutation {
    pub fn identity(field: FieldDescriptor, level: u32, points: Vec<Vec<u64>>) -> Self {
        let n = points.len();
        LevelPermutation { field, level, points, perm: Perm::identity(n), basepoint: None }
    }

    pub fn index_of(&self, x: &[u64]) -> Option<usize> {
        self.points.binary_search_by(|p| p.as_slice().cmp(x)).ok()
    }

    pub fn image(&self, x: &[u64]) -> Option<&[u64]> {
        self.index_of(x).map(|i| self.points[self.perm.apply(i as u32) as usize].as_slice())
    }

    fn same_set(&self, other: &LevelPermutation) -> Result<()> {
        if self.level != other.level || self.points != other.points {
            return Err(Error::ShapeMismatch("level permutations act on different sets".into()));
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LevelPermutation) -> Result<LevelPermutation> {
        self.same_set(other)?;
        Ok(LevelPermutation { perm: self.perm.compose(&other.perm), ..self.clone() })
    }

    pub fn inverse(&self) -> LevelPermutation {
        LevelPermutation { perm: self.perm.inverse(), ..self.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.is_identity()
    }

    pub fn is_even(&self) -> bool {
        self.perm.is_even()
    }

    pub fn label(&self, i: u32) -> String {
        let p = &self.points[i as usize];
        if p.len() == 1 {
            p[0].to_string()
        } else {
            format!("[{}]", p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
        }
    }

    /// Enumeration header followed by the one-line images.
    pub fn one_line(&self) -> String {
        let head: Vec<String> = (0..self.points.len() as u32).map(|i| self.label(i)).collect();
        let imgs: Vec<String> = self.perm.images().iter().map(|&i| self.label(i)).collect();
        format!("{}\n{}", head.join(" "), imgs.join(" "))
    }
}

impl fmt::Display for LevelPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.perm.cycle_string(|i| self.label(i)))
    }
}

fn representative(ring: &ResidueRing, class: &[u64], i: usize, prec: i64) -> Vec<Lfe> {
    let field = ring.field;
    let q = field.q();
    class
        .iter()
        .enumerate()
        .map(|(coord, &c)| {
            let base = ring.lift(c, prec);
            if i == 0 {
                return base;
            }
            let j = (i as u64).wrapping_mul(2 * coord as u64 + 1);
            let unit_ring = ResidueRing { field, level: 2 };
            let tail = unit_ring.lift((j % q) + q * ((j / q) % q), prec);
            &base + &tail.shift(ring.level as i64)
        })
        .collect()
}

/// Projects `g` to the permutation of `M_k` it induces, checking that the image of a class
/// does not depend on the representative and that the induced map is bijective.
pub fn level_project(g: &DiffRepr, k: u32, sampling: Sampling) -> Result<LevelPermutation> {
    if (g.prec as u64) < k as u64 {
        return Err(Error::PrecisionExhausted(format!("level {k} needs precision {k}, have {}", g.prec)));
    }
    let field = g.field();
    let ring = ResidueRing::new(field, k)?;
    let points = g.residue_classes(k)?;
    let index: HashMap<&[u64], usize> = points.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let reps = match sampling {
        Sampling::Representatives(r) => r.max(1),
        Sampling::Exhaustive => field.q() as usize,
    };
    let mut images = Vec::with_capacity(points.len());
    let mut hit = vec![None; points.len()];
    for (i, class) in points.iter().enumerate() {
        let mut image: Option<Vec<u64>> = None;
        for r in 0..reps {
            let x = representative(&ring, class, r, g.prec);
            let y = g.eval(&x)?;
            let py = y.iter().map(|c| project(c, k)).collect::<Result<Vec<u64>>>()?;
            match &image {
                None => image = Some(py),
                Some(prev) if *prev != py => {
                    return Err(Error::NotWellDefined {
                        level: k,
                        detail: format!("class {class:?} has representatives mapping to {prev:?} and {py:?}"),
                    })
                }
                _ => {}
            }
        }
        let image = image.expect("at least one representative");
        let j = *index
            .get(image.as_slice())
            .ok_or_else(|| Error::NotBijective { level: k, detail: format!("{class:?} maps to {image:?} outside M_{k}") })?;
        if let Some(prev) = hit[j] {
            return Err(Error::NotBijective { level: k, detail: format!("classes {} and {i} both map to {image:?}", prev) });
        }
        hit[j] = Some(i);
        images.push(j as u32);
    }
    Ok(LevelPermutation { field, level: k, points, perm: Perm::from_images(images)?, basepoint: None })
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctorialityReport {
    pub level: u32,
    pub composite: String,
    pub product: String,
    pub inverse: String,
    pub inverse_of_level: String,
    pub composition_ok: bool,
    pub inverse_ok: bool,
    pub pass: bool,
}

/// `(f∘g)_k = f_k ∘ g_k` and `(g^{-1})_k = (g_k)^{-1}`.
pub fn functoriality_check(f: &DiffRepr, g: &DiffRepr, k: u32) -> Result<FunctorialityReport> {
    let fk = level_project(f, k, Sampling::default())?;
    let gk = level_project(g, k, Sampling::default())?;
    let fgk = level_project(&f.compose(g), k, Sampling::default())?;
    let product = fk.compose(&gk)?;
    let ginv = level_project(&g.inverse(), k, Sampling::default())?;
    let composition_ok = fgk == product;
    let inverse_ok = ginv == gk.inverse();
    Ok(FunctorialityReport {
        level: k,
        composite: fgk.to_string(),
        product: product.to_string(),
        inverse: ginv.to_string(),
        inverse_of_level: gk.inverse().to_string(),
        composition_ok,
        inverse_ok,
        pass: composition_ok && inverse_ok,
    })
}
