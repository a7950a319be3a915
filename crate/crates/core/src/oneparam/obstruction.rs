use serde::Serialize;

use crate::calculus::{Domain, FnRepr};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::MPoly;
use crate::tower::DiffRepr;
use crate::ultrametric::{Family, FieldDescriptor, Lfe, Norm};

/// Default cap on the `x`-degree kept by symbolic compositions.
pub const DEGREE_BOUND: u32 = 64;
/// Default `θ`-adic precision of symbolic compositions.
pub const THETA_PRECISION: i64 = 32;

fn truncate(p: &MPoly<Lfe>, degree: u32, prec: i64) -> (MPoly<Lfe>, bool) {
    let mut dropped = false;
    let terms: Vec<_> = p
        .terms()
        .filter(|(m, _)| {
            let keep = m[0] <= degree;
            dropped |= !keep;
            keep
        })
        .map(|(m, c)| (m.clone(), c.with_precision_cap(prec)))
        .collect();
    (MPoly::from_terms(1, terms), dropped)
}

/// `g^n = g ∘ … ∘ g` as a polynomial truncated to `x`-degree `degree` and precision `prec`;
/// the flag reports whether terms beyond the degree cap were dropped.
pub fn iterate_symbolic(g: &MPoly<Lfe>, n: u32, degree: u32, prec: i64) -> (MPoly<Lfe>, bool) {
    let one = Lfe::one(g.sample_coeff().map(|c| c.field()).expect("nonzero polynomial"), prec);
    let mut acc = MPoly::var(0, 1, one.clone());
    let mut dropped = false;
    for _ in 0..n {
        let (next, d) = truncate(&g.compose(std::slice::from_ref(&acc), &one), degree, prec);
        acc = next;
        dropped |= d;
    }
    (acc, dropped)
}

fn scalar_poly(g: &DiffRepr) -> Result<MPoly<Lfe>> {
    if g.dim() != 1 {
        return Err(Error::ShapeMismatch("expected a map of K".into()));
    }
    match g.map.as_polynomials() {
        Some(mut ps) => Ok(ps.swap_remove(0)),
        None => Err(Error::InvalidArgument("symbolic iteration needs a polynomial-backed map".into())),
    }
}

fn gauss_norm(p: &MPoly<Lfe>, prime: u32) -> Norm {
    p.terms().fold(Norm::zero(prime), |acc, (_, c)| acc.max(c.norm()))
}

fn char_p_field(field: FieldDescriptor) -> Result<u32> {
    match field.family {
        Family::Laurent => Ok(field.p),
        Family::Padic => Err(Error::InvalidArgument("the additive obstruction concerns fields of characteristic p".into())),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub p: u32,
    pub degree_bound: u32,
    pub precision: i64,
    pub power_is_identity: bool,
    /// `g^p − id` at truncation.
    pub power_minus_identity: String,
    /// `(degree, valuation)` of each term of `g^p − id`.
    pub terms: Vec<(u32, i64)>,
    pub degree_truncated: bool,
    /// Valuation of the coefficient norm of `h = g − id`.
    pub h_valuation: Option<i64>,
    pub samples: usize,
    pub bound_holds: bool,
    /// Least `v(g^p(x) − x) − 2v(h) − v(x)` over the samples; nonnegative iff the bound holds.
    pub worst_margin: Option<i64>,
}

/// Computes `g^p` symbolically and checks `|g^p(x) − x| ≤ ‖h‖²|x|` at `samples` by direct
/// iteration of `g`.
pub fn additive_obstruction(g: &DiffRepr, samples: &[Lfe], degree: u32, prec: i64) -> Result<ObstructionReport> {
    let p = char_p_field(g.field())?;
    let poly = scalar_poly(g)?;
    let one = Lfe::one(g.field(), prec);
    let id = MPoly::var(0, 1, one);
    let h = poly.minus(&id);
    let h_norm = gauss_norm(&h, p);
    if h_norm > Norm::from_valuation(p, 1) {
        return Err(Error::InvalidArgument("need ‖g − id‖ ≤ |π|".into()));
    }
    let (gp, degree_truncated) = iterate_symbolic(&poly, p, degree, prec);
    let diff = gp.minus(&id);
    let terms: Vec<(u32, i64)> = diff.terms().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m[0], c.valuation().expect("nonzero"))).collect();
    let mut worst: Option<i64> = None;
    let mut violated = false;
    for x in samples {
        let mut y = x.clone();
        for _ in 0..p {
            y = g.eval(std::slice::from_ref(&y))?.swap_remove(0);
        }
        let d = &y - x;
        if d.is_zero() {
            continue;
        }
        match (h_norm.exp, x.is_zero()) {
            (Some(vh), false) => {
                let margin = d.valuation().unwrap() - 2 * vh - x.valuation().unwrap();
                violated |= margin < 0;
                worst = Some(worst.map_or(margin, |w| w.min(margin)));
            }
            _ => violated = true,
        }
    }
    Ok(ObstructionReport {
        p,
        degree_bound: degree,
        precision: prec,
        power_is_identity: terms.is_empty(),
        power_minus_identity: diff.to_string(),
        terms,
        degree_truncated,
        h_valuation: h_norm.exp,
        samples: samples.len(),
        bound_holds: !violated,
        worst_margin: worst,
    })
}

/// `x ↦ x + y·c`, the one-parameter family of shifts.
pub fn shift_subgroup(c: &Lfe, y: &Lfe, prec: i64) -> DiffRepr {
    DiffRepr::shift(c.field(), &[y * c], prec)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionIReport {
    pub p: u32,
    /// Powers `j` of the functions `(h − h∘g⁻¹)∘g^j`.
    pub powers: Vec<u32>,
    pub points: usize,
    pub rank: usize,
    pub required: usize,
    pub threshold: i64,
    pub holds: bool,
}

/// Rank of the evaluation matrix of `(h − h∘g⁻¹)∘g^j`, `j ∈ {0, 2, 3, …, p−1}`, at `points`.
pub fn condition_i_check(g: &DiffRepr, points: &[Vec<Lfe>]) -> Result<ConditionIReport> {
    let p = char_p_field(g.field())?;
    let powers: Vec<u32> = std::iter::once(0).chain(2..p).collect();
    if points.len() < powers.len() {
        return Err(Error::DegenerateSample(format!("{} points for {} functions", points.len(), powers.len())));
    }
    let ginv = g.inverse();
    let h = |x: &[Lfe]| -> Result<Vec<Lfe>> { Ok(g.eval(x)?.iter().zip(x).map(|(a, b)| a - b).collect()) };
    let mut rows = Vec::with_capacity(powers.len());
    for &j in &powers {
        let mut row = Vec::new();
        for x in points {
            let mut y = x.clone();
            for _ in 0..j {
                y = g.eval(&y)?;
            }
            let a = h(&y)?;
            let b = h(&ginv.eval(&y)?)?;
            row.extend(a.iter().zip(&b).map(|(u, v)| u - v));
        }
        rows.push(row);
    }
    let threshold = g.prec / 2;
    let rank = linalg::rank(rows, threshold)?;
    let required = (p - 1) as usize;
    Ok(ConditionIReport { p, powers, points: points.len(), rank, required, threshold, holds: rank == required })
}

/// `x + a·x^l` on `O_K`.
pub fn monomial_perturbation(field: FieldDescriptor, a: &Lfe, l: u32, prec: i64) -> Result<DiffRepr> {
    let one = Lfe::one(field, prec);
    let mut poly = MPoly::var(0, 1, one);
    poly.add_term(vec![l], a.clone());
    let s = a.valuation().unwrap_or(prec);
    DiffRepr::on_integers(FnRepr::polynomial(field, Domain::whole(1), vec![poly]), s, prec)
}
