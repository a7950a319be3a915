use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

use super::group::MultiplicativeBallGroup;
use crate::error::{Error, Result};
use crate::tower::{check_pair, level_project, DiffRepr, LevelPermutation, Perm, Sampling};
use crate::ultrametric::Lfe;

/// A homomorphism `η` from a finite ball group into the permutations of `M_q`, of the form
/// `η(x) = σ^{φ(x)}` for a character `φ: G → ℤ/m` with `φ(x₀) = 1`, `m = order(σ)`.
#[derive(Clone, Debug)]
pub struct LocalSubgroupLevel {
    pub group: Arc<MultiplicativeBallGroup>,
    pub anchor: usize,
    pub sigma: LevelPermutation,
    pub modulus: u64,
    pub phi: Vec<u64>,
    pub table: Vec<Perm>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EtaConditions {
    pub level: u32,
    pub group_order: usize,
    pub identity_ok: bool,
    pub multiplicative_ok: bool,
    pub anchor_ok: bool,
    pub pairs_checked: usize,
    pub holds: bool,
}

impl LocalSubgroupLevel {
    pub fn level(&self) -> u32 {
        self.sigma.level
    }

    pub fn eta(&self, x: usize) -> LevelPermutation {
        LevelPermutation { perm: self.table[x].clone(), basepoint: None, ..self.sigma.clone() }
    }

    /// `η(1) = id`, `η(x₁x₂) = η(x₁)η(x₂)` for all pairs, and `η(x₀) = σ`.
    pub fn check_conditions(&self) -> EtaConditions {
        let g = &self.group;
        let n = g.order();
        let identity_ok = self.table[g.identity].is_identity();
        let multiplicative_ok = (0..n).all(|a| (0..n).all(|b| self.table[g.mul(a, b)] == self.table[a].compose(&self.table[b])));
        let anchor_ok = self.table[self.anchor] == self.sigma.perm;
        EtaConditions {
            level: self.level(),
            group_order: n,
            identity_ok,
            multiplicative_ok,
            anchor_ok,
            pairs_checked: n * n,
            holds: identity_ok && multiplicative_ok && anchor_ok,
        }
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        (0..self.group.order()).map(|x| (self.group.label(x), self.eta(x).to_string())).collect()
    }
}

struct CharacterSearch<'a> {
    g: &'a MultiplicativeBallGroup,
    m: u64,
    phi: Vec<Option<u64>>,
    /// Required residues of `φ` modulo a divisor of `m`, one per element.
    below: Option<(Vec<u64>, u64)>,
}

impl CharacterSearch<'_> {
    fn admissible(&self, z: usize, v: u64) -> bool {
        self.below.as_ref().map_or(true, |(req, m)| v % m == req[z])
    }

    fn members(&self) -> Vec<usize> {
        (0..self.phi.len()).filter(|&i| self.phi[i].is_some()).collect()
    }

    /// Extends `φ` from the current subgroup `H` to all of `G`, one generator at a time,
    /// trying the trivial value first.
    fn extend(&mut self) -> bool {
        let Some(next) = self.phi.iter().position(|v| v.is_none()) else { return true };
        let h = self.members();
        let mut e = 1u64;
        let mut y = next;
        while self.phi[y].is_none() {
            y = self.g.mul(y, next);
            e += 1;
        }
        let target = self.phi[y].expect("power lands in H");
        let m = self.m;
        let candidates: Vec<u64> = (0..m).filter(|v| (e * v) % m == target).collect();
        for val in candidates {
            let mut added = Vec::new();
            let mut ok = true;
            for &base in &h {
                let mut z = base;
                for j in 1..e {
                    z = self.g.mul(z, next);
                    let v = (self.phi[base].unwrap() + j * val) % self.m;
                    match self.phi[z] {
                        None if self.admissible(z, v) => {
                            self.phi[z] = Some(v);
                            added.push(z);
                        }
                        Some(w) if w == v => {}
                        _ => ok = false,
                    }
                }
            }
            if ok && self.extend() {
                return true;
            }
            for z in added {
                self.phi[z] = None;
            }
        }
        false
    }
}

fn power_witness(g: &MultiplicativeBallGroup, x0: usize, m: u64) -> Option<String> {
    for y in 0..g.order() {
        let mut z = y;
        for e in 1..=g.element_order(y) {
            if z == x0 && e.gcd(&m) > 1 {
                return Some(format!("x0 = ({})^{e} and gcd({e}, {m}) > 1", g.label(y)));
            }
            z = g.mul(z, y);
        }
    }
    let p = g.field.p as u64;
    if m % p != 0 {
        return None;
    }
    let small: Vec<usize> = (0..g.order()).filter(|&z| (m / p) % g.element_order(z) == 0).collect();
    for y in 0..g.order() {
        let yp = g.pow(y, p);
        if let Some(&z) = small.iter().find(|&&z| g.mul(yp, z) == x0) {
            return Some(format!("x0 = ({})^{p}·({}) with ({})^{} = 1, so φ(x0) ≡ 0 mod {p}", g.label(y), g.label(z), g.label(z), m / p));
        }
    }
    None
}

/// Builds `η` on `G` with `η(x₀) = σ` and verifies the three conditions exhaustively.
pub fn eta_construct(sigma: &LevelPermutation, anchor: usize, group: Arc<MultiplicativeBallGroup>) -> Result<LocalSubgroupLevel> {
    build(sigma, anchor, group, None)
}

/// [`eta_construct`] one level above `below`, choosing `η` so that projecting it to the level
/// of `below` gives `η_below ∘ π`.
pub fn eta_lift(
    below: &LocalSubgroupLevel,
    sigma: &LevelPermutation,
    anchor: usize,
    group: Arc<MultiplicativeBallGroup>,
) -> Result<LocalSubgroupLevel> {
    check_pair(&below.sigma, sigma)?;
    let req = (0..group.order()).map(|x| group.project_to(x, &below.group).map(|px| below.phi[px])).collect::<Result<_>>()?;
    build(sigma, anchor, group, Some((req, below.modulus)))
}

fn build(
    sigma: &LevelPermutation,
    anchor: usize,
    group: Arc<MultiplicativeBallGroup>,
    below: Option<(Vec<u64>, u64)>,
) -> Result<LocalSubgroupLevel> {
    if anchor >= group.order() {
        return Err(Error::InvalidArgument(format!("anchor {anchor} outside a group of order {}", group.order())));
    }
    let m = sigma.perm.order();
    let ord = group.element_order(anchor);
    if ord % m != 0 {
        return Err(Error::Infeasible(format!("order(σ) = {m} does not divide order(x0) = {ord}")));
    }
    let mut search = CharacterSearch { g: &group, m, phi: vec![None; group.order()], below };
    let mut z = group.identity;
    for a in 0..ord {
        if !search.admissible(z, a % m) {
            return Err(Error::Infeasible(format!("({})^{a} cannot lift the level below", group.label(anchor))));
        }
        search.phi[z] = Some(a % m);
        z = group.mul(z, anchor);
    }
    if !search.extend() {
        let why = match (&search.below, power_witness(&group, anchor, m)) {
            (_, Some(w)) => w,
            (Some(_), None) => "no character of G lifts the level below".into(),
            (None, None) => "no character of G sends x0 to a generator".into(),
        };
        return Err(Error::Infeasible(format!("no homomorphism G → ⟨σ⟩ with x0 ↦ σ: {why}")));
    }
    let phi: Vec<u64> = search.phi.into_iter().map(|v| v.expect("complete character")).collect();
    let powers: Vec<Perm> = (0..m as i64).map(|a| sigma.perm.pow(a)).collect();
    let table = phi.iter().map(|&a| powers[a as usize].clone()).collect();
    let level = LocalSubgroupLevel { group, anchor, sigma: sigma.clone(), modulus: m, phi, table };
    let conditions = level.check_conditions();
    if !conditions.holds {
        return Err(Error::Mismatch(format!("constructed η violates the homomorphism conditions: {conditions:?}")));
    }
    Ok(level)
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub levels: Vec<u32>,
    pub elements_checked: usize,
    pub compatible: bool,
}

/// Checks `π(η_{v+1}(x)) = η_v(π(x))` on consecutive levels for every group element.
pub fn lift_check(levels: &[LocalSubgroupLevel]) -> Result<LiftReport> {
    let mut checked = 0;
    for w in levels.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if hi.group.project_to(hi.anchor, &lo.group)? != lo.anchor {
            return Err(Error::Incompatible("anchors do not project to each other".into()));
        }
        for x in 0..hi.group.order() {
            let px = hi.group.project_to(x, &lo.group)?;
            check_pair(&lo.eta(px), &hi.eta(x))
                .map_err(|e| Error::Incompatible(format!("x = {} at level {}: {e}", hi.group.label(x), hi.level())))?;
            checked += 1;
        }
    }
    Ok(LiftReport { levels: levels.iter().map(|l| l.level()).collect(), elements_checked: checked, compatible: true })
}

/// One `η` level per `(q, s_v)` in `plan`, each anchored at the image of `x0`, sending it to the
/// level-`q` permutation of `g` and lifting the previous level.
pub fn eta_tower(g: &DiffRepr, s: u32, plan: &[(u32, u32)], x0: &Lfe) -> Result<Vec<LocalSubgroupLevel>> {
    let field = g.field();
    let mut out: Vec<LocalSubgroupLevel> = Vec::with_capacity(plan.len());
    for &(q, s_v) in plan {
        let group = Arc::new(super::group::ball_group(s, s_v, field.p, field.u)?);
        let anchor = group.index_of_element(x0)?;
        let sigma = level_project(g, q, Sampling::default())?;
        let level = match out.last() {
            Some(below) => eta_lift(below, &sigma, anchor, group)?,
            None => eta_construct(&sigma, anchor, group)?,
        };
        out.push(level);
    }
    Ok(out)
}
