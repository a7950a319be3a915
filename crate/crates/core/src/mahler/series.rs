use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::combinatorics::{factorial, stirling_tables, MAX_OMEGA};
use crate::calculus::FnRepr;
use crate::error::{Error, Result};
use crate::poly::MPoly;
use crate::ultrametric::{legendre_lambda, Family, FieldDescriptor, Lfe};

/// What is known about the coefficients beyond the stored prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// All further coefficients vanish.
    Exact,
    /// Every further coefficient has valuation at least this bound.
    Bounded(i64),
    /// Nothing is known; decay is judged on a window of the stored prefix.
    Unknown,
}

/// Finite Mahler expansion `Σ_{j ≤ J} f_j C(x, j)` over ℚ_p.
#[derive(Clone, Debug)]
pub struct MahlerSeries {
    field: FieldDescriptor,
    coeffs: Vec<Lfe>,
    pub tail: Tail,
    /// Claimed smoothness class `t`, used by the decay proxy.
    pub class_t: Option<u32>,
}

fn floor_log(p: u32, n: u64) -> i64 {
    let (mut k, mut pk) = (0i64, p as u64);
    while pk <= n {
        k += 1;
        pk = pk.saturating_mul(p as u64);
    }
    k
}

/// `C(x, n)` for `x ∈ ℤ_p` known modulo `p^N`, returned modulo `p^{N − ⌊log_p n⌋}`.
pub fn binom_padic(x: &Lfe, n: u64) -> Result<Lfe> {
    let field = x.field();
    if field.family != Family::Padic {
        return Err(Error::InvalidArgument("binomial of a Laurent element".into()));
    }
    if let Some(v) = x.valuation() {
        if v < 0 && !x.is_zero() {
            return Err(Error::DomainViolation(format!("C({x}, {n}) needs |x| <= 1")));
        }
    }
    let prec = x.working_precision();
    let out_prec = prec - floor_log(field.p, n);
    if out_prec <= 0 {
        return Err(Error::PrecisionExhausted(format!("C(x, {n}) with {prec} digits")));
    }
    let r = BigInt::from(x.residue_bigint(prec)?);
    let mut num = BigInt::one();
    for i in 0..n {
        num *= &r - BigInt::from(i);
    }
    let c = num / factorial(n);
    Ok(Lfe::from_bigint(field, &c, out_prec))
}

impl MahlerSeries {
    pub fn new(field: FieldDescriptor, coeffs: Vec<Lfe>) -> Result<Self> {
        if field.family != Family::Padic {
            return Err(Error::InvalidArgument("Mahler series live over ℚ_p".into()));
        }
        if coeffs.iter().any(|c| c.field() != field) {
            return Err(Error::DescriptorMismatch(field.to_string(), "coefficient field".into()));
        }
        Ok(MahlerSeries { field, coeffs, tail: Tail::Exact, class_t: None })
    }

    pub fn from_ints(field: FieldDescriptor, coeffs: &[i64], prec: i64) -> Result<Self> {
        Self::new(field, coeffs.iter().map(|&c| Lfe::from_int(field, c, prec)).collect())
    }

    /// The identity `C(x, 1)`.
    pub fn identity(field: FieldDescriptor, prec: i64) -> Self {
        Self::from_ints(field, &[0, 1], prec).expect("p-adic field")
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn coeffs(&self) -> &[Lfe] {
        &self.coeffs
    }

    /// Coefficient `f_j`, zero past the stored prefix.
    pub fn coeff(&self, j: usize) -> Lfe {
        self.coeffs.get(j).cloned().unwrap_or_else(|| Lfe::zero(self.field))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest absolute precision among the stored coefficients.
    pub fn precision(&self) -> i64 {
        self.coeffs.iter().filter_map(|c| c.precision()).min().unwrap_or(crate::ultrametric::DEFAULT_PRECISION)
    }

    /// Truncation to the first `len` coefficients.
    pub fn truncate(&self, len: usize) -> Self {
        let mut s = self.clone();
        if s.coeffs.len() > len {
            s.coeffs.truncate(len);
            s.tail = Tail::Unknown;
        }
        s
    }

    /// Windowed decay proxy: `max_{j in window} |f_j|·j^t < threshold`, over the last
    /// quarter of the stored coefficients (at least one).
    pub fn decay_flag(&self, threshold: f64) -> bool {
        match self.tail {
            Tail::Exact => true,
            Tail::Bounded(v) => v > 0,
            Tail::Unknown => {
                let n = self.coeffs.len();
                if n == 0 {
                    return true;
                }
                let w = (n / 4).max(1);
                let t = self.class_t.unwrap_or(0) as i32;
                (n - w..n).all(|j| self.coeffs[j].norm().to_f64() * (j.max(1) as f64).powi(t) < threshold)
            }
        }
    }

    /// `Σ f_j C(x, j)` converted to the monomial basis.
    pub fn to_polynomial(&self) -> Result<MPoly<Lfe>> {
        let n = self.coeffs.len().saturating_sub(1);
        let tables = stirling_tables(n.min(super::combinatorics::MAX_TABLE))?;
        if n > tables.size {
            return Err(Error::BoundExceeded(format!("series length {}", n + 1)));
        }
        let mut poly = MPoly::zero(1);
        for (j, fj) in self.coeffs.iter().enumerate() {
            let prec = fj.working_precision() + legendre_lambda(j as u64, self.field.p) as i64;
            for l in 0..=j {
                let s = &tables.s[j][l];
                if s.is_zero() {
                    continue;
                }
                let c = Lfe::from_rational(self.field, s.numer(), s.denom(), prec)?;
                poly.add_term(vec![l as u32], fj * &c);
            }
        }
        Ok(poly)
    }

    /// Rational coefficients as integers (balanced representatives), for display.
    pub fn to_ints(&self) -> Vec<Option<BigInt>> {
        self.coeffs.iter().map(|c| if c.is_zero() { Some(BigInt::zero()) } else { c.to_bigint_balanced() }).collect()
    }

    /// Parses `p=3 N=16 coeffs=[v0,v1,...]` with integer or `a/b` entries.
    pub fn parse(s: &str) -> Result<Self> {
        let (mut p, mut n, mut coeffs) = (None, 32i64, None);
        let mut rest = s.trim();
        while !rest.is_empty() {
            let pos = s.len() - s.trim_start().len() + (s.trim().len() - rest.len());
            let (tok, after) = if let Some(i) = rest.find("coeffs=") {
                if i == 0 {
                    let close = rest.find(']').ok_or(Error::Parse { pos, msg: "unterminated coefficient list".into() })?;
                    (&rest[..=close], &rest[close + 1..])
                } else {
                    let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                    (&rest[..end], &rest[end..])
                }
            } else {
                let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                (&rest[..end], &rest[end..])
            };
            let err = |msg: &str| Error::Parse { pos, msg: msg.to_string() };
            let (key, val) = tok.split_once('=').ok_or_else(|| err("expected key=value"))?;
            match key {
                "p" => p = Some(val.parse::<u32>().map_err(|_| err("bad prime"))?),
                "N" => n = val.parse::<i64>().map_err(|_| err("bad precision"))?,
                "coeffs" => {
                    let inner = val.trim().strip_prefix('[').and_then(|v| v.strip_suffix(']')).ok_or_else(|| err("expected [..]"))?;
                    let mut list = Vec::new();
                    for item in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                        let (a, b) = item.split_once('/').unwrap_or((item, "1"));
                        let a: BigInt = a.trim().parse().map_err(|_| err("bad coefficient"))?;
                        let b: BigInt = b.trim().parse().map_err(|_| err("bad coefficient"))?;
                        list.push((a, b));
                    }
                    coeffs = Some(list);
                }
                _ => return Err(err("unknown key")),
            }
            rest = after.trim_start();
        }
        let p = p.ok_or(Error::Parse { pos: 0, msg: "missing p".into() })?;
        let field = FieldDescriptor::padic(p)?;
        let coeffs = coeffs.ok_or(Error::Parse { pos: 0, msg: "missing coeffs".into() })?;
        let vals = coeffs.iter().map(|(a, b)| Lfe::from_rational(field, a, b, n)).collect::<Result<Vec<_>>>()?;
        Self::new(field, vals)
    }
}

impl fmt::Display for MahlerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> =
            self.to_ints().into_iter().zip(&self.coeffs).map(|(i, c)| i.map(|v| v.to_string()).unwrap_or_else(|| c.to_string())).collect();
        write!(f, "[{}]", items.join(","))
    }
}

/// `f_j = Δ^j f(0) = Σ_i (−1)^{j−i} C(j, i) f(i)` for `j ≤ J`.
pub fn expand(f: &FnRepr, j_max: usize, prec: i64) -> Result<MahlerSeries> {
    if f.in_dim() != 1 || f.out_dim != 1 {
        return Err(Error::ShapeMismatch("Mahler expansion needs a scalar function of one variable".into()));
    }
    let field = f.field;
    let values = (0..=j_max).map(|i| f.eval_scalar(&[Lfe::from_int(field, i as i64, prec)])).collect::<Result<Vec<_>>>()?;
    let coeffs = forward_differences(&values);
    let tail = match f.as_polynomials() {
        Some(p) if (p[0].total_degree() as usize) <= j_max => Tail::Exact,
        _ => Tail::Unknown,
    };
    Ok(MahlerSeries::new(field, coeffs)?.with_tail(tail))
}

/// `[Δ^j v]_0` for each `j < v.len()`.
pub fn forward_differences(values: &[Lfe]) -> Vec<Lfe> {
    let mut row = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    while let Some(first) = row.first() {
        out.push(first.clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

/// Mahler expansion of an integer-coefficient polynomial given low to high.
pub fn expand_poly_ints(field: FieldDescriptor, poly: &[i64], j_max: usize, prec: i64) -> Result<MahlerSeries> {
    let p = MPoly::from_terms(1, poly.iter().enumerate().map(|(e, &c)| (vec![e as u32], Lfe::from_int(field, c, prec))));
    expand(&FnRepr::scalar_poly(field, p), j_max, prec)
}

/// `Σ f_j C(x, j)`, with precision capped by the tail bound when one is recorded.
pub fn evaluate(s: &MahlerSeries, x: &Lfe) -> Result<Lfe> {
    if x.field() != s.field {
        return Err(Error::DescriptorMismatch(x.field().to_string(), s.field.to_string()));
    }
    let mut acc = Lfe::zero(s.field);
    for (j, fj) in s.coeffs.iter().enumerate() {
        if fj.is_exact_zero() {
            continue;
        }
        let b = binom_padic(x, j as u64)?;
        acc = acc.checked_add(&fj.checked_mul(&b)?)?;
    }
    match s.tail {
        Tail::Bounded(v) => Ok(acc.with_precision_cap(v)),
        Tail::Unknown if !s.decay_flag(1.0) => Err(Error::DivergentTail("coefficients do not decay on the tail window".into())),
        _ => Ok(acc),
    }
}

fn check_composable(g: &MahlerSeries, f: &MahlerSeries) -> Result<()> {
    if g.field != f.field {
        return Err(Error::DescriptorMismatch(g.field.to_string(), f.field.to_string()));
    }
    for (name, s) in [("outer", g), ("inner", f)] {
        if !s.decay_flag(1.0) {
            return Err(Error::DivergentTail(format!("{name} series")));
        }
    }
    if let Some(j) = f.coeffs.iter().position(|c| !c.is_zero() && c.valuation().unwrap() < 0) {
        return Err(Error::DomainViolation(format!("inner coefficient f_{j} is not integral")));
    }
    Ok(())
}

/// Coefficients `(g∘f)_k` for `k ≤ K` from `Δ^k[g(f(x))]|_0`.
pub fn compose(g: &MahlerSeries, f: &MahlerSeries, k_max: usize) -> Result<MahlerSeries> {
    check_composable(g, f)?;
    let prec = g.precision().min(f.precision());
    let values = (0..=k_max).map(|i| evaluate(g, &evaluate(f, &Lfe::from_int(f.field, i as i64, prec))?)).collect::<Result<Vec<_>>>()?;
    let tail = if g.tail == Tail::Exact && f.tail == Tail::Exact { Tail::Unknown } else { f.tail };
    Ok(MahlerSeries::new(g.field, forward_differences(&values))?.with_tail(tail))
}

/// `Q^{k,n}(f) = n!·Δ^k C(f(x), n)|_0` from the Ω coefficients and the shifted sequences `f − j`.
pub fn q_omega(f: &MahlerSeries, k: usize, n: usize) -> Result<Lfe> {
    let prec = f.precision();
    let field = f.field;
    if n == 0 {
        return Ok(Lfe::from_int(field, (k == 0) as i64, prec));
    }
    let shifted: Vec<Vec<Lfe>> = (0..n)
        .map(|i| {
            let c = (n - 1 - i) as i64;
            (0..=k).map(|m| if m == 0 { &f.coeff(0) - &Lfe::from_int(field, c, prec) } else { f.coeff(m) }).collect()
        })
        .collect();
    let mut total = Lfe::zero_mod(field, prec);
    let mut m = vec![0usize; n];
    loop {
        let om = super::combinatorics::omega(k, &m)?;
        if !om.is_zero() {
            let mut term = Lfe::from_bigint(field, &om, prec);
            for (i, &mi) in m.iter().enumerate() {
                term = &term * &shifted[i][mi];
            }
            total = &total + &term;
        }
        let mut i = 0;
        while i < n && m[i] == k {
            m[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        m[i] += 1;
    }
    Ok(total)
}

/// `n!·Δ^k C(f(x), n)|_0` from evaluations of `f` at `0..k`.
pub fn q_numeric(f: &MahlerSeries, k: usize, n: usize) -> Result<Lfe> {
    let prec = f.precision();
    let vals = (0..=k)
        .map(|i| {
            let y = evaluate(f, &Lfe::from_int(f.field, i as i64, prec))?;
            let mut acc = Lfe::one(f.field, prec);
            for j in 0..n {
                acc = &acc * &(&y - &Lfe::from_int(f.field, j as i64, prec));
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(forward_differences(&vals).swap_remove(k))
}

/// `(g∘f)_k = Σ_n g_n Q^{k,n}(f)/n!` for `k ≤ K` through the Ω coefficients.
pub fn compose_omega(g: &MahlerSeries, f: &MahlerSeries, k_max: usize) -> Result<MahlerSeries> {
    check_composable(g, f)?;
    if k_max > MAX_OMEGA || g.len() > MAX_OMEGA + 1 {
        return Err(Error::BoundExceeded(format!("Ω route with K={k_max}, {} outer coefficients", g.len())));
    }
    let prec = g.precision().min(f.precision());
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut acc = Lfe::zero_mod(g.field, prec);
        for (n, gn) in g.coeffs.iter().enumerate() {
            if gn.is_exact_zero() {
                continue;
            }
            let q = q_omega(f, k, n)?;
            let nf = Lfe::from_bigint(g.field, &factorial(n as u64), prec + 2 * legendre_lambda(n as u64, g.field.p) as i64);
            acc = &acc + &(gn * &q.checked_div(&nf)?);
        }
        out.push(acc);
    }
    MahlerSeries::new(g.field, out)
}

/// Mahler coefficients of a power series with rational coefficients via `x^n = Σ_k T_{n,k} C(x,k)`.
pub fn monomial_to_mahler(field: FieldDescriptor, a: &[BigRational], prec: i64) -> Result<MahlerSeries> {
    let n = a.len().saturating_sub(1);
    let t = stirling_tables(n)?;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let c: BigRational = (0..=n).map(|m| &a[m] * BigRational::from_integer(t.t[m][k].clone())).sum();
        out.push(Lfe::from_rational(field, c.numer(), c.denom(), prec)?);
    }
    MahlerSeries::new(field, out)
}

/// Monomial coefficients of a Mahler series with rational coefficients via `S`.
pub fn mahler_to_monomial(f: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = f.len().saturating_sub(1);
    let t = stirling_tables(n)?;
    Ok((0..=n).map(|l| (0..=n).map(|m| &f[m] * &t.s[m][l]).sum()).collect())
}

/// Balanced integer value of a residue, used in reports.
pub fn small_int(x: &Lfe) -> Option<i64> {
    x.to_bigint_balanced().and_then(|b| b.to_i64())
}
