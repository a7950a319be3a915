use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::MPoly;
use crate::ultrametric::Lfe;

use super::eval::{phi_eval, upsilon_eval, Flavor};
use super::expr::Expr;
use super::fnrepr::{Backing, FnRepr};
use super::points::{axpy, PhiPoint, UpsilonPoint};

/// Point at which an identity is checked; the variant selects the flavor.
#[derive(Clone, Debug)]
pub enum CheckPoint {
    Phi(PhiPoint),
    Upsilon(UpsilonPoint),
}

impl CheckPoint {
    pub fn flavor(&self) -> Flavor {
        match self {
            CheckPoint::Phi(_) => Flavor::Phi,
            CheckPoint::Upsilon(_) => Flavor::Upsilon,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            CheckPoint::Phi(p) => p.order(),
            CheckPoint::Upsilon(p) => p.level(),
        }
    }

    fn precision(&self) -> i64 {
        let x = match self {
            CheckPoint::Phi(p) => &p.x,
            CheckPoint::Upsilon(p) => p.x_slots()[0],
        };
        x.iter().map(|c| c.working_precision()).max().unwrap_or(crate::ultrametric::DEFAULT_PRECISION)
    }
}

/// Outcome of an identity check: both sides, the precision they consumed and, on
/// mismatch, the value of every summand of the expansion.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub identity: String,
    pub flavor: Flavor,
    pub n: usize,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    /// Digits of precision lost between the inputs and the less precise side.
    pub margin: i64,
    pub pass: bool,
    pub terms: Vec<(String, String)>,
}

impl CheckReport {
    /// Turns a failed check into [`Error::Mismatch`] carrying the term table.
    pub fn ensure(self) -> Result<Self> {
        if self.pass {
            return Ok(self);
        }
        let table: Vec<String> = self.terms.iter().map(|(t, v)| format!("  {t} = {v}")).collect();
        Err(Error::Mismatch(format!("{} n={}: lhs {:?} rhs {:?}\n{}", self.identity, self.n, self.lhs, self.rhs, table.join("\n"))))
    }
}

fn finish(identity: &str, pt: &CheckPoint, lhs: Vec<Lfe>, rhs: Vec<Lfe>, terms: impl FnOnce() -> Vec<(String, String)>) -> CheckReport {
    let n0 = pt.precision();
    let min_prec = lhs.iter().chain(&rhs).filter_map(|c| c.precision()).min().unwrap_or(n0);
    let pass = min_prec > 0 && lhs.len() == rhs.len() && lhs.iter().zip(&rhs).all(|(a, b)| a == b);
    CheckReport {
        identity: identity.to_string(),
        flavor: pt.flavor(),
        n: pt.order(),
        lhs: lhs.iter().map(|c| c.to_string()).collect(),
        rhs: rhs.iter().map(|c| c.to_string()).collect(),
        margin: (n0 - min_prec).max(0),
        pass,
        terms: if pass { Vec::new() } else { terms() },
    }
}

fn names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("f{i}")).collect()
}

fn expr_terms(expr: &Expr, env: &[FnRepr], pt: &UpsilonPoint, names: &[String]) -> Vec<(String, String)> {
    expr.summands()
        .into_iter()
        .map(|(c, e)| {
            let v = e.eval(env, pt).map(|v| v.to_string()).unwrap_or_else(|err| err.to_string());
            let sign = if c < 0 { "-" } else { "" };
            (format!("{sign}{}", e.display(names)), v)
        })
        .collect()
}

/// `Σ` over assignments `c: {1..n} → {1..k}` of `Π_i Φ̄^{|c⁻¹(i)|} f_i(x + Σ_{c(j) < i} v_j t_j; v_{c⁻¹(i)}; t_{c⁻¹(i)})`.
fn phi_product_terms(fs: &[FnRepr], pt: &PhiPoint) -> Result<Vec<(String, Lfe)>> {
    let (k, n) = (fs.len(), pt.order());
    let total = k.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut c = code;
        let assign: Vec<usize> = (0..n)
            .map(|_| {
                let d = c % k;
                c /= k;
                d
            })
            .collect();
        let mut base = pt.x.clone();
        let mut value: Option<Lfe> = None;
        let mut label = String::new();
        for (i, f) in fs.iter().enumerate() {
            let idx: Vec<usize> = (0..n).filter(|&j| assign[j] == i).collect();
            let sub = PhiPoint::new(
                base.clone(),
                idx.iter().map(|&j| pt.v[j].clone()).collect(),
                idx.iter().map(|&j| pt.t[j].clone()).collect(),
            )?;
            let y = phi_eval(f, &sub)?.swap_remove(0);
            value = Some(match value {
                None => y,
                Some(a) => &a * &y,
            });
            let js: Vec<String> = idx.iter().map(|j| (j + 1).to_string()).collect();
            label.push_str(&format!("(Φ̄^{{{}}}f{})", js.join(","), i + 1));
            for &j in &idx {
                base = axpy(&base, &pt.t[j], &pt.v[j]);
            }
        }
        out.push((label, value.expect("at least one factor")));
    }
    Ok(out)
}

fn product_of(fs: &[FnRepr]) -> FnRepr {
    let mut acc = fs[fs.len() - 1].clone();
    for f in fs[..fs.len() - 1].iter().rev() {
        acc = acc.product(f);
    }
    acc
}

fn check_scalar_factors(fs: &[FnRepr], last_may_be_vector: bool) -> Result<()> {
    for (i, f) in fs.iter().enumerate() {
        if f.out_dim != 1 && !(last_may_be_vector && i + 1 == fs.len()) {
            return Err(Error::ShapeMismatch(format!("factor {} must be scalar valued", i + 1)));
        }
        if f.in_dim() != fs[0].in_dim() {
            return Err(Error::ShapeMismatch("factors must share their domain dimension".into()));
        }
    }
    Ok(())
}

fn product_identity(identity: &str, fs: &[FnRepr], pt: &CheckPoint) -> Result<CheckReport> {
    check_scalar_factors(fs, true)?;
    let last = fs.len() - 1;
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut tables: Vec<Vec<(String, String)>> = Vec::new();
    for r in 0..fs[last].out_dim {
        let mut env: Vec<FnRepr> = fs[..last].to_vec();
        env.push(fs[last].coordinate(r));
        let prod = product_of(&env);
        match pt {
            CheckPoint::Upsilon(p) => {
                let leaves = (0..env.len()).map(Expr::leaf).collect();
                let expr = Expr::Prod(leaves).upsilon_n(p.level());
                lhs.push(upsilon_eval(&prod, p)?.swap_remove(0));
                rhs.push(expr.eval(&env, p)?);
                tables.push(expr_terms(&expr, &env, p, &names(env.len())));
            }
            CheckPoint::Phi(p) => {
                lhs.push(phi_eval(&prod, p)?.swap_remove(0));
                let terms = phi_product_terms(&env, p)?;
                let mut acc = Lfe::zero(prod.field);
                for (_, v) in &terms {
                    acc = &acc + v;
                }
                rhs.push(acc);
                tables.push(terms.into_iter().map(|(l, v)| (l, v.to_string())).collect());
            }
        }
    }
    Ok(finish(identity, pt, lhs, rhs, || tables.concat()))
}

/// `(fg)^{[n]} = (Υ⊗P̂ + π̂⊗Υ)ⁿ (f⊗g)`, or for Φ-points the sum over splittings of
/// `{1..n}` between the two factors. `g` may be vector valued.
pub fn leibniz_check(f: &FnRepr, g: &FnRepr, pt: &CheckPoint) -> Result<CheckReport> {
    product_identity("leibniz", &[f.clone(), g.clone()], pt)
}

/// Product rule for `k` factors: `[Σ_α π̂^{⊗α} ⊗ Υ ⊗ P̂^{⊗(k−α−1)}]ⁿ`.
pub fn leibniz_multi_check(fs: &[FnRepr], pt: &CheckPoint) -> Result<CheckReport> {
    if fs.is_empty() {
        return Err(Error::InvalidArgument("at least one factor".into()));
    }
    product_identity("leibniz-multi", fs, pt)
}

/// Chain rule for `f∘u` with `u: K^s → K^m` and polynomial `f` on `K^m`; the right side is
/// the expansion of `Υⁿ F(u_1, …, u_m)` through divided differences of `F`.
pub fn chain_check(f: &FnRepr, u: &FnRepr, pt: &CheckPoint) -> Result<CheckReport> {
    if u.out_dim != f.in_dim() {
        return Err(Error::ShapeMismatch(format!("u lands in K^{} but f lives on K^{}", u.out_dim, f.in_dim())));
    }
    let polys: Vec<MPoly<Lfe>> = match (&f.backing, f.as_polynomials()) {
        (Backing::Opaque(_), _) | (_, None) => {
            return Err(Error::InvalidArgument("chain expansion needs a polynomial or Mahler outer map".into()))
        }
        (_, Some(p)) => p,
    };
    let env: Vec<FnRepr> = (0..u.out_dim).map(|j| u.coordinate(j)).collect();
    let composite = f.compose(u);
    let upt = match pt {
        CheckPoint::Upsilon(p) => p.clone(),
        CheckPoint::Phi(p) => UpsilonPoint::embed(p),
    };
    let n = pt.order();
    let names: Vec<String> = (1..=u.out_dim).map(|j| format!("u{j}")).collect();
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut tables = Vec::new();
    lhs.extend(match pt {
        CheckPoint::Upsilon(p) => upsilon_eval(&composite, p)?,
        CheckPoint::Phi(p) => phi_eval(&composite, p)?,
    });
    for poly in &polys {
        let expr = Expr::Compose { poly: poly.clone(), args: (0..u.out_dim).map(Expr::leaf).collect() }.upsilon_n(n);
        rhs.push(expr.eval(&env, &upt)?);
        tables.push(expr_terms(&expr, &env, &upt, &names));
    }
    Ok(finish("chain", pt, lhs, rhs, || tables.concat()))
}
