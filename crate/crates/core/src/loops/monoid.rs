use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tower::Perm;

/// A map `f: M → N` of finite pointed sets `(M, s₀) → (N, y₀)` with `f(s₀) = y₀`; both sets are
/// `{0, …, |·|−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PinnedMap {
    pub s0: usize,
    pub n: usize,
    pub y0: usize,
    pub table: Vec<usize>,
}

impl PinnedMap {
    pub fn new(table: Vec<usize>, s0: usize, n: usize, y0: usize) -> Result<Self> {
        if s0 >= table.len() || y0 >= n || table.iter().any(|&v| v >= n) {
            return Err(Error::InvalidArgument(format!("{table:?} is not a map into a set of size {n}")));
        }
        if table[s0] != y0 {
            return Err(Error::BasepointViolated(format!("f({s0}) = {} but the basepoint of N is {y0}", table[s0])));
        }
        Ok(PinnedMap { s0, n, y0, table })
    }

    pub fn domain_size(&self) -> usize {
        self.table.len()
    }

    /// `f ∘ ψ`.
    pub fn precompose(&self, psi: &Perm) -> Result<PinnedMap> {
        if psi.len() != self.domain_size() || psi.apply(self.s0 as u32) as usize != self.s0 {
            return Err(Error::BasepointViolated("ψ must be a permutation of M fixing s₀".into()));
        }
        let table = (0..self.domain_size()).map(|x| self.table[psi.apply(x as u32) as usize]).collect();
        Ok(PinnedMap { table, ..self.clone() })
    }

    /// All pinned maps `(M, s₀) → (N, y₀)` with `|M| = m`.
    pub fn enumerate(m: usize, s0: usize, n: usize, y0: usize) -> Vec<PinnedMap> {
        let free = m - 1;
        let total = n.pow(free as u32);
        (0..total)
            .map(|mut code| {
                let mut table = vec![y0; m];
                for (x, slot) in table.iter_mut().enumerate() {
                    if x != s0 {
                        *slot = code % n;
                        code /= n;
                    }
                }
                PinnedMap { s0, n, y0, table }
            })
            .collect()
    }
}

/// The class of pinned maps under precomposition by basepoint-fixing permutations, stored as the
/// sorted multiset of values other than `y₀`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LoopClass {
    pub n: usize,
    pub y0: usize,
    pub values: Vec<usize>,
    /// `|M| − 1` at a finite level; `None` for finitely supported maps on an infinite set.
    pub capacity: Option<usize>,
}

impl LoopClass {
    pub fn unit(n: usize, y0: usize, capacity: Option<usize>) -> Self {
        LoopClass { n, y0, values: Vec::new(), capacity }
    }

    pub fn new(n: usize, y0: usize, mut values: Vec<usize>, capacity: Option<usize>) -> Result<Self> {
        if values.iter().any(|&v| v >= n || v == y0) {
            return Err(Error::InvalidArgument(format!("{values:?} must avoid the basepoint {y0} and lie below {n}")));
        }
        if let Some(cap) = capacity {
            if values.len() > cap {
                return Err(Error::CapacityExceeded { size: values.len(), cap });
            }
        }
        values.sort_unstable();
        Ok(LoopClass { n, y0, values, capacity })
    }

    pub fn is_unit(&self) -> bool {
        self.values.is_empty()
    }

    /// A representative map whose non-basepoint values appear in increasing order.
    pub fn representative(&self) -> Option<PinnedMap> {
        let cap = self.capacity?;
        let mut table = vec![self.y0; cap + 1];
        table[1..=self.values.len()].copy_from_slice(&self.values);
        Some(PinnedMap { s0: 0, n: self.n, y0: self.y0, table })
    }

    fn same_space(&self, other: &LoopClass) -> Result<()> {
        if (self.n, self.y0, self.capacity) != (other.n, other.y0, other.capacity) {
            return Err(Error::Incompatible("loop classes over different pointed sets".into()));
        }
        Ok(())
    }

    /// `self = other ∨ c`, if such a `c` exists.
    pub fn cancel(&self, other: &LoopClass) -> Option<LoopClass> {
        self.same_space(other).ok()?;
        let mut rest = self.values.clone();
        for v in &other.values {
            let i = rest.iter().position(|w| w == v)?;
            rest.remove(i);
        }
        Some(LoopClass { values: rest, ..self.clone() })
    }
}

impl fmt::Display for LoopClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
    }
}

pub fn class_of(f: &PinnedMap) -> Result<LoopClass> {
    if f.table.get(f.s0) != Some(&f.y0) {
        return Err(Error::BasepointViolated(format!("f does not send {} to {}", f.s0, f.y0)));
    }
    let values = f.table.iter().enumerate().filter(|&(x, &v)| x != f.s0 && v != f.y0).map(|(_, &v)| v).collect();
    LoopClass::new(f.n, f.y0, values, Some(f.domain_size() - 1))
}

/// Orbits of pinned maps under `Hom₀(M)` by direct enumeration of both.
pub fn orbits(m: usize, s0: usize, n: usize, y0: usize) -> Vec<BTreeSet<Vec<usize>>> {
    let maps = PinnedMap::enumerate(m, s0, n, y0);
    let others: Vec<u32> = (0..m as u32).filter(|&x| x as usize != s0).collect();
    let fixing: Vec<Perm> = permutations_of(&others)
        .into_iter()
        .map(|arr| {
            let mut images: Vec<u32> = (0..m as u32).collect();
            for (src, dst) in others.iter().zip(arr) {
                images[*src as usize] = dst;
            }
            Perm::from_images(images).expect("permutation")
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in &maps {
        if seen.contains(&f.table) {
            continue;
        }
        let orbit: BTreeSet<Vec<usize>> = fixing.iter().map(|psi| f.precompose(psi).expect("fixes s0").table).collect();
        seen.extend(orbit.iter().cloned());
        out.push(orbit);
    }
    out
}

fn permutations_of(items: &[u32]) -> Vec<Vec<u32>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations_of(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Every class of `Ω(M, N)` with `|M| = m`, `|N| = n`, basepoints `0`.
pub fn all_classes(m: usize, n: usize) -> Vec<LoopClass> {
    let mut out: Vec<LoopClass> =
        PinnedMap::enumerate(m, 0, n, 0).iter().map(|f| class_of(f).expect("pinned")).collect::<BTreeSet<_>>().into_iter().collect();
    out.sort();
    out
}

/// Ordering `χ` of the `2c` non-basepoint points of the wedge `M ∨ M` (first copy, then second)
/// used to lay the combined map out on the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiSpec(pub Vec<usize>);

impl ChiSpec {
    pub fn identity(slots: usize) -> Self {
        ChiSpec((0..2 * slots).collect())
    }

    pub fn reversed(slots: usize) -> Self {
        ChiSpec((0..2 * slots).rev().collect())
    }

    /// First copy and second copy alternate.
    pub fn interleaved(slots: usize) -> Self {
        ChiSpec((0..slots).flat_map(|i| [i, slots + i]).collect())
    }

    fn validate(&self, len: usize) -> Result<()> {
        let mut seen = vec![false; len];
        if self.0.len() != len || self.0.iter().any(|&i| i >= len || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidArgument(format!("χ must be a bijection of {len} wedge points")));
        }
        Ok(())
    }
}

/// Number of wedge slots per copy for classes `a` and `b`.
pub fn wedge_slots(a: &LoopClass, b: &LoopClass) -> usize {
    a.capacity.unwrap_or(a.values.len().max(b.values.len()))
}

/// `a ∨ b`: the map on `M ∨ M` that is `a` on one copy and `b` on the other, transported to the
/// target through `χ`.
pub fn wedge(a: &LoopClass, b: &LoopClass, chi: &ChiSpec) -> Result<LoopClass> {
    a.same_space(b)?;
    let slots = wedge_slots(a, b);
    chi.validate(2 * slots)?;
    let lay = |c: &LoopClass| {
        let mut v = c.values.clone();
        v.resize(slots, c.y0);
        v
    };
    let wedge_points: Vec<usize> = lay(a).into_iter().chain(lay(b)).collect();
    let on_target: Vec<usize> = chi.0.iter().map(|&i| wedge_points[i]).filter(|&v| v != a.y0).collect();
    LoopClass::new(a.n, a.y0, on_target, a.capacity)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LawReport {
    pub m: usize,
    pub n: usize,
    pub classes: usize,
    pub orbits_match: bool,
    pub unit: bool,
    pub commutative: bool,
    pub associative: bool,
    pub cancelative: bool,
    pub chi_independent: bool,
    pub grothendieck_additive: bool,
    pub grothendieck_injective: bool,
    pub triples_checked: usize,
    pub holds: bool,
}

/// Exhaustive check of the monoid laws of `Ω(M, N)` for `|M| = m`, `|N| = n`, treating a
/// wedge that exceeds the capacity as undefined.
pub fn monoid_law_check(m: usize, n: usize) -> Result<LawReport> {
    use super::group::grothendieck;
    let classes = all_classes(m, n);
    let orbit_classes: BTreeSet<LoopClass> = orbits(m, 0, n, 0)
        .iter()
        .map(|o| {
            let cs: BTreeSet<LoopClass> =
                o.iter().map(|t| class_of(&PinnedMap { s0: 0, n, y0: 0, table: t.clone() }).expect("pinned")).collect();
            (cs.len() == 1).then(|| cs.into_iter().next().unwrap())
        })
        .collect::<Option<_>>()
        .unwrap_or_default();
    let orbits_match = orbit_classes.len() == classes.len() && orbit_classes.iter().eq(classes.iter());
    let slots = m - 1;
    let chis = [ChiSpec::identity(slots), ChiSpec::reversed(slots), ChiSpec::interleaved(slots)];
    let w = |a: &LoopClass, b: &LoopClass| -> Result<Option<LoopClass>> {
        match wedge(a, b, &chis[0]) {
            Ok(c) => Ok(Some(c)),
            Err(Error::CapacityExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut r = LawReport { m, n, classes: classes.len(), orbits_match, ..Default::default() };
    let unit = LoopClass::unit(n, 0, Some(slots));
    r.unit = classes.iter().all(|a| w(a, &unit).ok().flatten().as_ref() == Some(a));
    r.commutative = true;
    r.chi_independent = true;
    r.grothendieck_additive = true;
    r.cancelative = true;
    r.associative = true;
    for a in &classes {
        for b in &classes {
            let ab = w(a, b)?;
            r.commutative &= ab == w(b, a)?;
            for chi in &chis[1..] {
                let other = match wedge(a, b, chi) {
                    Ok(c) => Some(c),
                    Err(Error::CapacityExceeded { .. }) => None,
                    Err(e) => return Err(e),
                };
                r.chi_independent &= other == ab;
            }
            if let Some(ab) = &ab {
                r.grothendieck_additive &= grothendieck(ab) == grothendieck(a).add(&grothendieck(b))?;
                r.cancelative &= ab.cancel(b).as_ref() == Some(a);
            }
            for c in &classes {
                let bc = w(b, c)?;
                let left = match &ab {
                    Some(ab) => w(ab, c)?,
                    None => None,
                };
                let right = match &bc {
                    Some(bc) => w(a, bc)?,
                    None => None,
                };
                if left.is_some() || right.is_some() {
                    r.associative &= left == right;
                }
                if let (Some(ac), Some(bc)) = (w(a, c)?, &bc) {
                    if ac == *bc {
                        r.cancelative &= a == b;
                    }
                }
                r.triples_checked += 1;
            }
        }
    }
    let images: BTreeSet<Vec<i64>> = classes.iter().map(|c| grothendieck(c).coords).collect();
    r.grothendieck_injective = images.len() == classes.len();
    r.holds = r.orbits_match
        && r.unit
        && r.commutative
        && r.associative
        && r.cancelative
        && r.chi_independent
        && r.grothendieck_additive
        && r.grothendieck_injective;
    Ok(r)
}
