//! Sparse multivariate polynomials over the crate's scalar types.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ultrametric::Lfe;

/// Ring operations shared by local field elements and exact rationals.
pub trait Scalar: Clone + fmt::Debug + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn int_like(&self, n: i64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    /// True only for values that are exactly zero (not merely zero to some precision).
    fn is_exact_zero(&self) -> bool;
}

impl Scalar for Lfe {
    fn zero_like(&self) -> Self {
        Lfe::zero(self.field())
    }
    fn one_like(&self) -> Self {
        Lfe::one(self.field(), self.working_precision())
    }
    fn int_like(&self, n: i64) -> Self {
        Lfe::from_int(self.field(), n, self.working_precision())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_exact_zero(&self) -> bool {
        Lfe::is_exact_zero(self)
    }
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn int_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

pub type Monomial = Vec<u32>;

/// Polynomial in `nvars` variables stored as a map from exponent vectors to coefficients.
#[derive(Clone, Debug)]
pub struct MPoly<F: Scalar> {
    nvars: usize,
    terms: BTreeMap<Monomial, F>,
}

impl<F: Scalar> MPoly<F> {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: F, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The variable `x_i` with coefficient `one`.
    pub fn var(i: usize, nvars: usize, one: F) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(m, one);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, F)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> Option<&F> {
        self.terms.get(m)
    }

    /// Any coefficient, used as a prototype for constants.
    pub fn sample_coeff(&self) -> Option<&F> {
        self.terms.values().next()
    }

    pub fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_exact_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                let s = e.plus(&c);
                if s.is_exact_zero() {
                    self.terms.remove(&m);
                } else {
                    *e = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    pub fn plus(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn negate(&self) -> Self {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.negate())).collect() }
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m, a) in &self.terms {
            r.add_term(m.clone(), a.times(c));
        }
        r
    }

    pub fn times(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut r = Self::zero(self.nvars);
        for (ma, a) in &self.terms {
            for (mb, b) in &o.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                r.add_term(m, a.times(b));
            }
        }
        r
    }

    /// Product truncated to monomials whose exponents stay within `caps` (per variable).
    pub fn times_truncated(&self, o: &Self, caps: &[Option<u32>]) -> Self {
        let mut r = Self::zero(self.nvars);
        for (ma, a) in &self.terms {
            for (mb, b) in &o.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if m.iter().zip(caps).all(|(e, c)| c.map_or(true, |c| *e <= c)) {
                    r.add_term(m, a.times(b));
                }
            }
        }
        r
    }

    pub fn pow(&self, e: u32, one: &F) -> Self {
        let mut acc = Self::constant(one.clone(), self.nvars);
        for _ in 0..e {
            acc = acc.times(self);
        }
        acc
    }

    /// Evaluates at a point; `proto` supplies the zero when the polynomial is empty.
    pub fn eval(&self, x: &[F], proto: &F) -> F {
        assert_eq!(x.len(), self.nvars, "point arity");
        let mut powers: Vec<Vec<F>> = x.iter().map(|xi| vec![xi.one_like()]).collect();
        let mut acc = proto.zero_like();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().times(&x[i]);
                    powers[i].push(next);
                }
                term = term.times(&powers[i][e as usize]);
            }
            acc = acc.plus(&term);
        }
        acc
    }

    /// Substitutes polynomials (all in the same number of variables) for the variables.
    pub fn compose(&self, subs: &[MPoly<F>], one: &F) -> MPoly<F> {
        assert_eq!(subs.len(), self.nvars, "substitution arity");
        let n = subs.first().map_or(0, |s| s.nvars);
        let mut powers: Vec<Vec<MPoly<F>>> = subs.iter().map(|_| vec![MPoly::constant(one.clone(), n)]).collect();
        let mut acc = MPoly::zero(n);
        for (m, c) in &self.terms {
            let mut term = MPoly::constant(c.clone(), n);
            for (i, &e) in m.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().times(&subs[i]);
                    powers[i].push(next);
                }
                if e > 0 {
                    term = term.times(&powers[i][e as usize]);
                }
            }
            acc = acc.plus(&term);
        }
        acc
    }

    /// Keeps the monomials divisible by every variable in `vars` and divides them out.
    pub fn divide_out_vars(&self, vars: &[usize]) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if vars.iter().all(|&v| m[v] >= 1) {
                let mut m2 = m.clone();
                for &v in vars {
                    m2[v] -= 1;
                }
                r.add_term(m2, c.clone());
            }
        }
        r
    }

    /// Re-embeds into a ring with more variables; `map[i]` is the new index of variable i.
    pub fn reindex(&self, new_nvars: usize, map: &[usize]) -> Self {
        let mut r = Self::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut m2 = vec![0; new_nvars];
            for (i, &e) in m.iter().enumerate() {
                m2[map[i]] += e;
            }
            r.add_term(m2, c.clone());
        }
        r
    }

    pub fn map_coeffs<G: Scalar>(&self, f: impl Fn(&F) -> G) -> MPoly<G> {
        let mut r = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c));
        }
        r
    }

    pub fn try_map_coeffs<G: Scalar, E>(&self, f: impl Fn(&F) -> Result<G, E>) -> Result<MPoly<G>, E> {
        let mut r = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c)?);
        }
        Ok(r)
    }
}

impl<F: Scalar + fmt::Display> fmt::Display for MPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = if self.nvars == 1 { vec!["x".into()] } else { (1..=self.nvars).map(|i| format!("x{i}")).collect() };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = format!("({c})");
                for (i, &e) in m.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => s.push_str(&format!("*{}", names[i])),
                        _ => s.push_str(&format!("*{}^{e}", names[i])),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
