use crate::error::{Error, Result};
use crate::poly::MPoly;
use crate::ultrametric::{Lfe, Norm};

use super::fnrepr::FnRepr;
use super::points::{axpy, PhiPoint, UpsilonPoint};

/// Default cap on the order of difference quotients.
pub const MAX_ORDER: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Upsilon,
    Phi,
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::BoundExceeded(format!("order {n} > {MAX_ORDER}")));
    }
    Ok(())
}

/// Stand-in for a vanishing scalar when the backing is opaque: `π^{⌈N/2⌉}`.
///
/// For a map of class `C^{n+1}` the resulting value differs from the continuous extension
/// by at most `|π|^{⌈N/2⌉}·‖Φ̄^{n+1} f‖`.
pub fn small_scalar(like: &Lfe) -> Lfe {
    let n = like.working_precision();
    Lfe::one(like.field(), n).shift((n + 1) / 2)
}

fn check_result_precision(v: Vec<Lfe>) -> Result<Vec<Lfe>> {
    if let Some(c) = v.iter().find(|c| c.precision().is_some_and(|p| p < 0)) {
        return Err(Error::PrecisionExhausted(format!("result known only modulo π^{}", c.precision().unwrap())));
    }
    Ok(v)
}

fn divide_all(a: Vec<Lfe>, b: Vec<Lfe>, t: &Lfe) -> Result<Vec<Lfe>> {
    a.iter().zip(&b).map(|(x, y)| (x - y).checked_div(t)).collect()
}

fn phi_recursive(f: &FnRepr, x: &[Lfe], v: &[Vec<Lfe>], t: &[Lfe]) -> Result<Vec<Lfe>> {
    let k = t.len();
    if k == 0 {
        return f.eval(x);
    }
    let shifted = axpy(x, &t[k - 1], &v[k - 1]);
    let a = phi_recursive(f, &shifted, &v[..k - 1], &t[..k - 1])?;
    let b = phi_recursive(f, x, &v[..k - 1], &t[..k - 1])?;
    divide_all(a, b, &t[k - 1])
}

/// `h(t) = f(x + Σ t_i v_i)` with the monomials divisible by every `t_i` divided out.
fn phi_bar_polynomial(poly: &MPoly<Lfe>, pt: &PhiPoint) -> MPoly<Lfe> {
    let n = pt.order();
    let one = pt.x[0].one_like_wide();
    let subs: Vec<MPoly<Lfe>> = (0..pt.dim())
        .map(|j| {
            let mut s = MPoly::constant(pt.x[j].clone(), n);
            for i in 0..n {
                s = s.plus(&MPoly::var(i, n, pt.v[i][j].clone()));
            }
            s
        })
        .collect();
    let vars: Vec<usize> = (0..n).collect();
    poly.compose(&subs, &one).divide_out_vars(&vars)
}

trait WideOne {
    fn one_like_wide(&self) -> Lfe;
}

impl WideOne for Lfe {
    fn one_like_wide(&self) -> Lfe {
        Lfe::one(self.field(), self.working_precision() + 64)
    }
}

fn check_partial_sums(f: &FnRepr, pt: &PhiPoint) -> Result<()> {
    let mut y = pt.x.clone();
    if !f.domain.contains(&y) {
        return Err(Error::DomainViolation("base point".into()));
    }
    for (i, (v, t)) in pt.v.iter().zip(&pt.t).enumerate() {
        y = axpy(&y, t, v);
        if !f.domain.contains(&y) {
            return Err(Error::DomainViolation(format!("partial sum after direction {}", i + 1)));
        }
    }
    Ok(())
}

/// `Φ̄ⁿ f(x; v; t)`. Vanishing scalars use the symbolic extension for polynomial and
/// Mahler backings and [`small_scalar`] for opaque ones.
pub fn phi_eval(f: &FnRepr, pt: &PhiPoint) -> Result<Vec<Lfe>> {
    check_order(pt.order())?;
    if pt.dim() != f.in_dim() {
        return Err(Error::ShapeMismatch(format!("point of dimension {} for a map on K^{}", pt.dim(), f.in_dim())));
    }
    check_partial_sums(f, pt)?;
    if pt.t.iter().all(|t| !t.is_zero()) {
        return check_result_precision(phi_recursive(f, &pt.x, &pt.v, &pt.t)?);
    }
    match f.as_polynomials() {
        Some(polys) => {
            let vals = polys.iter().map(|p| phi_bar_polynomial(p, pt).eval(&pt.t, &pt.x[0])).collect();
            check_result_precision(vals)
        }
        None => {
            let t: Vec<Lfe> = pt.t.iter().map(|t| if t.is_zero() { small_scalar(t) } else { t.clone() }).collect();
            check_result_precision(phi_recursive(f, &pt.x, &pt.v, &t)?)
        }
    }
}

fn upsilon_recursive(f: &FnRepr, pt: &UpsilonPoint, perturb: bool) -> Result<Vec<Lfe>> {
    match pt {
        UpsilonPoint::Base(x) => f.eval(x),
        UpsilonPoint::Step { base, dir, t } => {
            let t = if perturb && t.is_zero() { small_scalar(t) } else { t.clone() };
            if t.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let a = upsilon_recursive(f, &base.axpy(&t, dir)?, perturb)?;
            let b = upsilon_recursive(f, base, perturb)?;
            divide_all(a, b, &t)
        }
    }
}

/// `f^{[n]}` of a scalar polynomial in `m` variables, in the flattened coordinates of
/// [`UpsilonPoint::flatten`].
pub fn upsilon_polynomial(poly: &MPoly<Lfe>, level: usize, one: &Lfe) -> MPoly<Lfe> {
    let m = poly.nvars();
    let mut cur = poly.clone();
    for k in 1..=level {
        let half_x = 1usize << (k - 1);
        let half_s = half_x - 1;
        let nvars = m * (1 << k) + (1 << k) - 1;
        let t_var = nvars - 1;
        let prev_vars = m * half_x + half_s;
        let z_index = |i: usize| if i < m * half_x { i } else { m * (1 << k) + (i - m * half_x) };
        let w_index = |i: usize| if i < m * half_x { m * half_x + i } else { m * (1 << k) + half_s + (i - m * half_x) };
        let zmap: Vec<usize> = (0..prev_vars).map(z_index).collect();
        let subs: Vec<MPoly<Lfe>> = (0..prev_vars)
            .map(|i| {
                let z = MPoly::var(z_index(i), nvars, one.clone());
                let mut tw = vec![0u32; nvars];
                tw[w_index(i)] = 1;
                tw[t_var] = 1;
                z.plus(&MPoly::from_terms(nvars, vec![(tw, one.clone())]))
            })
            .collect();
        let shifted = cur.compose(&subs, one);
        let diff = shifted.minus(&cur.reindex(nvars, &zmap));
        cur = diff.divide_out_vars(&[t_var]);
    }
    cur
}

/// `Υⁿ f = f^{[n]}` at a point of `U^{[n]}`.
pub fn upsilon_eval(f: &FnRepr, pt: &UpsilonPoint) -> Result<Vec<Lfe>> {
    check_order(pt.level())?;
    if pt.dim() != f.in_dim() {
        return Err(Error::ShapeMismatch(format!("point of dimension {} for a map on K^{}", pt.dim(), f.in_dim())));
    }
    match upsilon_recursive(f, pt, false) {
        Err(Error::DivisionByZero) => {}
        other => return other.and_then(check_result_precision),
    }
    match f.as_polynomials() {
        Some(polys) => {
            let flat = pt.flatten();
            let one = flat[0].one_like_wide();
            let vals = polys.iter().map(|p| upsilon_polynomial(p, pt.level(), &one).eval(&flat, &flat[0])).collect();
            check_result_precision(vals)
        }
        None => check_result_precision(upsilon_recursive(f, pt, true)?),
    }
}

/// Finite sample of `V^{(k)}`: base points, unit directions and scalars with `|t| ≤ 1`.
#[derive(Clone, Debug)]
pub struct Sampler {
    pub points: Vec<Vec<Lfe>>,
    pub directions: Vec<Vec<Lfe>>,
    pub scalars: Vec<Lfe>,
    pub flavor: Flavor,
    /// Maximum number of tuples evaluated per order.
    pub limit: usize,
}

fn vector_norm(v: &[Lfe]) -> Norm {
    let p = v.first().map(|c| c.p()).unwrap_or(2);
    v.iter().fold(Norm::zero(p), |acc, c| acc.max(c.norm()))
}

/// Lower bound for the `C^n_b` norm: the largest `‖Φ̄^k f‖` (or `‖Υ^k f‖`) over `k ≤ n`
/// and the sampled tuples.
pub fn cnb_norm(f: &FnRepr, n: usize, sampler: &Sampler) -> Result<Norm> {
    check_order(n)?;
    if sampler.points.is_empty() || (n > 0 && (sampler.directions.is_empty() || sampler.scalars.is_empty())) {
        return Err(Error::EmptySampler);
    }
    let p = f.field.p;
    let mut best = Norm::zero(p);
    let mut evaluated = 0usize;
    for k in 0..=n {
        let radix = [sampler.points.len()].into_iter().chain((0..k).flat_map(|_| [sampler.directions.len(), sampler.scalars.len()]));
        let radix: Vec<usize> = radix.collect();
        let total: usize = radix.iter().product();
        for code in 0..total.min(sampler.limit.max(1)) {
            let mut c = code;
            let mut digits = Vec::with_capacity(radix.len());
            for r in &radix {
                digits.push(c % r);
                c /= r;
            }
            let x = sampler.points[digits[0]].clone();
            let v = (0..k).map(|i| sampler.directions[digits[1 + 2 * i]].clone()).collect();
            let t = (0..k).map(|i| sampler.scalars[digits[2 + 2 * i]].clone()).collect();
            let pt = PhiPoint::new(x, v, t)?;
            let val = match sampler.flavor {
                Flavor::Phi => phi_eval(f, &pt),
                Flavor::Upsilon => upsilon_eval(f, &UpsilonPoint::embed(&pt)),
            };
            match val {
                Ok(y) => {
                    best = best.max(vector_norm(&y));
                    evaluated += 1;
                }
                Err(Error::DomainViolation(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    if evaluated == 0 {
        return Err(Error::EmptySampler);
    }
    Ok(best)
}

/// `dⁿ f(x).(v_1..v_n) = n!·Φ̄ⁿ f(x; v; 0)`.
pub fn differential_eval(f: &FnRepr, x: &[Lfe], dirs: &[Vec<Lfe>]) -> Result<Vec<Lfe>> {
    let n = dirs.len();
    let ch = f.field.characteristic();
    if ch != 0 && (ch as usize) <= n {
        return Err(Error::CharacteristicObstruction { p: ch, n });
    }
    let zero = Lfe::zero(f.field);
    let pt = PhiPoint::new(x.to_vec(), dirs.to_vec(), vec![zero; n])?;
    let phi = phi_eval(f, &pt)?;
    let prec = x.first().map(|c| c.working_precision()).unwrap_or(crate::ultrametric::DEFAULT_PRECISION);
    let fact = (1..=n as i64).fold(Lfe::one(f.field, prec), |acc, i| &acc * &Lfe::from_int(f.field, i, prec));
    Ok(phi.iter().map(|c| c * &fact).collect())
}
