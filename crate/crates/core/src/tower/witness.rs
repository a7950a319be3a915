use std::collections::BTreeMap;

use serde::Serialize;

use super::diff::{level_project, DiffRepr, Sampling};
use crate::calculus::FnRepr;
use crate::error::{Error, Result};
use crate::poly::MPoly;
use crate::ultrametric::{carmichael_exponent, FieldDescriptor, Lfe};

/// Coefficients `a_i` and exponents `e_i` of the perturbation `Σ a_i x^{e_i}` added to the identity.
#[derive(Clone, Debug)]
pub struct WitnessSpec {
    pub terms: Vec<(Lfe, u32)>,
}

impl WitnessSpec {
    /// `a·(x^e − x^{2e})`.
    pub fn flat(a: Lfe, e: u32) -> Self {
        let neg = -&a;
        WitnessSpec { terms: vec![(a, e), (neg, 2 * e)] }
    }

    /// `p·(x^e − x^{2e})` with `e` the exponent of `(ℤ/p^{max(k−1,1)})^*`.
    pub fn default_for(field: FieldDescriptor, k: u32, prec: i64) -> Self {
        let e = carmichael_exponent(field.p, (k.max(2) - 1).max(1)) as u32;
        Self::flat(Lfe::from_int(field, field.p as i64, prec), e)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessProof {
    pub p: u32,
    pub k: u32,
    /// Every exponent is a multiple of this unit-group exponent.
    pub exponent_modulus: u64,
    pub units_checked: usize,
    pub level_identity: bool,
    pub level_permutation: String,
    pub moved_point: String,
    pub moved_image: String,
    /// Valuation of `f(x) − x` at the moved point.
    pub displacement_valuation: i64,
}

fn val(x: &Lfe) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        x.valuation()
    }
}

/// `f = id + Σ a_i x^{e_i}` on the units of `ℤ_p`, with `Σ a_i = 0`, `|a_i| ≤ |p|`, and every
/// `e_i` a multiple of the exponent of `(ℤ/p^{k−v})^*` where `v = min v(a_i)`. Such an `f`
/// induces the identity on the units of `ℤ/p^k` although `f ≠ id`.
pub fn witness_flat_polynomial(p: u32, k: u32, spec: &WitnessSpec, prec: i64) -> Result<(DiffRepr, WitnessProof)> {
    let field = FieldDescriptor::padic(p)?;
    if spec.terms.is_empty() {
        return Err(Error::ConstraintViolated("no perturbation terms".into()));
    }
    if spec.terms.iter().any(|(a, e)| *e == 0 || a.field() != field) {
        return Err(Error::ConstraintViolated("exponents must be positive and coefficients lie in ℚ_p".into()));
    }
    let mut sum = Lfe::zero(field);
    for (a, _) in &spec.terms {
        sum = &sum + a;
        if val(a).is_some_and(|v| v < 1) {
            return Err(Error::ConstraintViolated(format!("coefficient {a} has |a| > |p|")));
        }
    }
    if !sum.is_zero() {
        return Err(Error::ConstraintViolated(format!("coefficients sum to {sum}, not 0")));
    }
    let mut by_exp: BTreeMap<u32, Lfe> = BTreeMap::new();
    for (a, e) in &spec.terms {
        let slot = by_exp.entry(*e).or_insert_with(|| Lfe::zero(field));
        *slot = &*slot + a;
    }
    by_exp.retain(|_, a| !a.is_zero());
    if by_exp.is_empty() {
        return Err(Error::ConstraintViolated("degenerate witness: the perturbation vanishes and f = id".into()));
    }
    let v_min = by_exp.values().filter_map(val).min().unwrap_or(prec);
    let needed = (k as i64 - v_min).max(0) as u32;
    let modulus = carmichael_exponent(p, needed);
    if let Some(e) = by_exp.keys().find(|&&e| e as u64 % modulus != 0) {
        return Err(Error::ConstraintViolated(format!("exponent {e} is not a multiple of {modulus}")));
    }

    let one = Lfe::one(field, prec);
    let mut poly = MPoly::var(0, 1, one);
    for (e, a) in &by_exp {
        poly.add_term(vec![*e], a.clone());
    }
    let map = FnRepr::polynomial(field, crate::calculus::Domain::units(field, prec), vec![poly]);
    let f = DiffRepr::on_units(map, v_min, prec)?;

    let level = level_project(&f, k, Sampling::Exhaustive)?;
    let units_checked = level.points.len();
    let bound = (p as i64).pow(k + 2);
    let moved = (1..bound).filter(|x| x % p as i64 != 0).find_map(|x| {
        let xl = Lfe::from_int(field, x, prec);
        let y = f.eval(std::slice::from_ref(&xl)).ok()?.swap_remove(0);
        let d = &y - &xl;
        val(&d).map(|v| (xl, y, v))
    });
    let (x, y, v) = moved.ok_or_else(|| Error::ConstraintViolated("f agrees with id on all sampled units".into()))?;
    let proof = WitnessProof {
        p,
        k,
        exponent_modulus: modulus,
        units_checked,
        level_identity: level.is_identity(),
        level_permutation: level.to_string(),
        moved_point: x.to_string(),
        moved_image: y.to_string(),
        displacement_valuation: v,
    };
    Ok((f, proof))
}
