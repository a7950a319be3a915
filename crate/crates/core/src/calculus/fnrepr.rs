use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mahler::MahlerSeries;
use crate::poly::{MPoly, Scalar};
use crate::ultrametric::{FieldDescriptor, Lfe};

/// Closed ball `{x : |x_i − c_i| ≤ p^(−r)}` in K^m.
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: Vec<Lfe>,
    pub radius_exp: i64,
}

impl Ball {
    pub fn new(center: Vec<Lfe>, radius_exp: i64) -> Self {
        Ball { center, radius_exp }
    }

    pub fn contains(&self, x: &[Lfe]) -> bool {
        x.len() == self.center.len()
            && x.iter().zip(&self.center).all(|(a, c)| {
                let d = a - c;
                d.is_zero() || d.valuation().unwrap() >= self.radius_exp
            })
    }
}

/// Clopen domain: all of K^m or a finite union of balls.
#[derive(Clone, Debug)]
pub enum Domain {
    Whole { dim: usize },
    Balls { dim: usize, balls: Vec<Ball> },
}

impl Domain {
    pub fn whole(dim: usize) -> Self {
        Domain::Whole { dim }
    }

    /// The closed unit ball O_K^m.
    pub fn unit_ball(field: FieldDescriptor, dim: usize, prec: i64) -> Self {
        Domain::Balls { dim, balls: vec![Ball::new(vec![Lfe::zero_mod(field, prec); dim], 0)] }
    }

    /// The units {x : |x| = 1} of O_K (one ball per nonzero residue digit), K = ℚ_p only.
    pub fn units(field: FieldDescriptor, prec: i64) -> Self {
        let balls = (1..field.p as i64).map(|d| Ball::new(vec![Lfe::from_int(field, d, prec)], 1)).collect();
        Domain::Balls { dim: 1, balls }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Whole { dim } | Domain::Balls { dim, .. } => *dim,
        }
    }

    pub fn contains(&self, x: &[Lfe]) -> bool {
        match self {
            Domain::Whole { dim } => x.len() == *dim,
            Domain::Balls { balls, .. } => balls.iter().any(|b| b.contains(x)),
        }
    }
}

/// Claimed smoothness class α ∈ {n, [n]}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    C(u32),
    Bracket(u32),
    Analytic,
}

pub type Evaluator = Arc<dyn Fn(&[Lfe]) -> Result<Vec<Lfe>> + Send + Sync>;

#[derive(Clone)]
pub enum Backing {
    /// One polynomial per output coordinate.
    Polynomial(Vec<MPoly<Lfe>>),
    /// One Mahler series per output coordinate (input dimension 1).
    Mahler(Vec<MahlerSeries>),
    Opaque(Evaluator),
}

impl fmt::Debug for Backing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backing::Polynomial(p) => write!(f, "Polynomial({} coords)", p.len()),
            Backing::Mahler(m) => write!(f, "Mahler({} coords)", m.len()),
            Backing::Opaque(_) => write!(f, "Opaque"),
        }
    }
}

/// An evaluable map U ⊂ K^m → K^r.
#[derive(Clone, Debug)]
pub struct FnRepr {
    pub field: FieldDescriptor,
    pub domain: Domain,
    pub out_dim: usize,
    pub backing: Backing,
    pub class: Smoothness,
}

impl FnRepr {
    pub fn polynomial(field: FieldDescriptor, domain: Domain, polys: Vec<MPoly<Lfe>>) -> Self {
        assert!(polys.iter().all(|p| p.nvars() == domain.dim()), "polynomial arity must match the domain");
        FnRepr { field, out_dim: polys.len(), domain, backing: Backing::Polynomial(polys), class: Smoothness::Analytic }
    }

    /// Scalar polynomial on all of K^m.
    pub fn scalar_poly(field: FieldDescriptor, poly: MPoly<Lfe>) -> Self {
        let dim = poly.nvars();
        Self::polynomial(field, Domain::whole(dim), vec![poly])
    }

    pub fn mahler(field: FieldDescriptor, series: Vec<MahlerSeries>) -> Self {
        let prec = series.iter().map(|s| s.precision()).min().unwrap_or(32);
        FnRepr {
            field,
            domain: Domain::unit_ball(field, 1, prec),
            out_dim: series.len(),
            backing: Backing::Mahler(series),
            class: Smoothness::C(0),
        }
    }

    pub fn opaque(field: FieldDescriptor, domain: Domain, out_dim: usize, class: Smoothness, f: Evaluator) -> Self {
        FnRepr { field, domain, out_dim, backing: Backing::Opaque(f), class }
    }

    /// The identity map of K^m restricted to `domain`.
    pub fn identity(field: FieldDescriptor, domain: Domain, prec: i64) -> Self {
        let m = domain.dim();
        let one = Lfe::one(field, prec);
        let polys = (0..m).map(|i| MPoly::var(i, m, one.clone())).collect();
        Self::polynomial(field, domain, polys)
    }

    pub fn in_dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self.backing, Backing::Opaque(_))
    }

    pub fn eval(&self, x: &[Lfe]) -> Result<Vec<Lfe>> {
        if x.len() != self.in_dim() {
            return Err(Error::ShapeMismatch(format!("point of dimension {} for a map on K^{}", x.len(), self.in_dim())));
        }
        if !self.domain.contains(x) {
            let pts: Vec<String> = x.iter().map(|c| c.to_string()).collect();
            return Err(Error::DomainViolation(pts.join(", ")));
        }
        self.eval_unchecked(x)
    }

    fn eval_unchecked(&self, x: &[Lfe]) -> Result<Vec<Lfe>> {
        match &self.backing {
            Backing::Polynomial(ps) => {
                let proto = x.first().cloned().unwrap_or_else(|| Lfe::zero(self.field));
                Ok(ps.iter().map(|p| p.eval(x, &proto)).collect())
            }
            Backing::Mahler(ss) => ss.iter().map(|s| crate::mahler::evaluate(s, &x[0])).collect(),
            Backing::Opaque(f) => f(x),
        }
    }

    pub fn eval_scalar(&self, x: &[Lfe]) -> Result<Lfe> {
        Ok(self.eval(x)?.swap_remove(0))
    }

    /// Monomial form of a polynomial or Mahler backing.
    pub fn as_polynomials(&self) -> Option<Vec<MPoly<Lfe>>> {
        match &self.backing {
            Backing::Polynomial(ps) => Some(ps.clone()),
            Backing::Mahler(ss) => ss.iter().map(|s| s.to_polynomial().ok()).collect(),
            Backing::Opaque(_) => None,
        }
    }

    /// Restricts the map to a single output coordinate.
    pub fn coordinate(&self, j: usize) -> FnRepr {
        let backing = match &self.backing {
            Backing::Polynomial(ps) => Backing::Polynomial(vec![ps[j].clone()]),
            Backing::Mahler(ss) => Backing::Mahler(vec![ss[j].clone()]),
            Backing::Opaque(f) => {
                let f = f.clone();
                Backing::Opaque(Arc::new(move |x| Ok(vec![f(x)?.swap_remove(j)])))
            }
        };
        FnRepr { field: self.field, domain: self.domain.clone(), out_dim: 1, backing, class: self.class }
    }

    /// Pointwise product with a scalar-valued map on the same domain.
    pub fn product(&self, scalar: &FnRepr) -> FnRepr {
        assert_eq!(scalar.out_dim, 1, "left factor must be scalar valued");
        if let (Some(a), Some(b)) = (scalar.as_polynomials(), self.as_polynomials()) {
            let polys = b.iter().map(|q| a[0].times(q)).collect();
            return FnRepr::polynomial(self.field, self.domain.clone(), polys);
        }
        let (a, b) = (scalar.clone(), self.clone());
        FnRepr::opaque(
            self.field,
            self.domain.clone(),
            self.out_dim,
            self.class,
            Arc::new(move |x| {
                let s = a.eval_unchecked(x)?.swap_remove(0);
                Ok(b.eval_unchecked(x)?.iter().map(|y| &s * y).collect())
            }),
        )
    }

    /// Linear combination `a·self + b·other`.
    pub fn linear_combination(&self, a: &Lfe, other: &FnRepr, b: &Lfe) -> FnRepr {
        if let (Some(p), Some(q)) = (self.as_polynomials(), other.as_polynomials()) {
            let polys = p.iter().zip(&q).map(|(x, y)| x.scale(a).plus(&y.scale(b))).collect();
            return FnRepr::polynomial(self.field, self.domain.clone(), polys);
        }
        let (f, g, a, b) = (self.clone(), other.clone(), a.clone(), b.clone());
        FnRepr::opaque(
            self.field,
            self.domain.clone(),
            self.out_dim,
            self.class,
            Arc::new(move |x| {
                let (u, v) = (f.eval_unchecked(x)?, g.eval_unchecked(x)?);
                Ok(u.iter().zip(&v).map(|(s, t)| &(&a * s) + &(&b * t)).collect())
            }),
        )
    }

    /// The composition `self ∘ inner`, defined on the domain of `inner`.
    pub fn compose(&self, inner: &FnRepr) -> FnRepr {
        assert_eq!(inner.out_dim, self.in_dim(), "composition arity");
        if let (Some(f), Some(u)) = (self.as_polynomials(), inner.as_polynomials()) {
            if matches!(self.domain, Domain::Whole { .. }) {
                let one = Lfe::one(self.field, 64);
                let polys = f.iter().map(|p| p.compose(&u, &one)).collect();
                return FnRepr::polynomial(self.field, inner.domain.clone(), polys);
            }
        }
        let (f, u) = (self.clone(), inner.clone());
        FnRepr::opaque(self.field, inner.domain.clone(), self.out_dim, self.class, Arc::new(move |x| f.eval(&u.eval_unchecked(x)?)))
    }
}

impl Scalar for Vec<Lfe> {
    fn zero_like(&self) -> Self {
        self.iter().map(|x| x.zero_like()).collect()
    }
    fn one_like(&self) -> Self {
        self.iter().map(|x| x.one_like()).collect()
    }
    fn int_like(&self, n: i64) -> Self {
        self.iter().map(|x| x.int_like(n)).collect()
    }
    fn plus(&self, o: &Self) -> Self {
        self.iter().zip(o).map(|(a, b)| a + b).collect()
    }
    fn minus(&self, o: &Self) -> Self {
        self.iter().zip(o).map(|(a, b)| a - b).collect()
    }
    fn times(&self, o: &Self) -> Self {
        self.iter().zip(o).map(|(a, b)| a * b).collect()
    }
    fn negate(&self) -> Self {
        self.iter().map(|a| -a).collect()
    }
    fn is_exact_zero(&self) -> bool {
        self.iter().all(|a| a.is_exact_zero())
    }
}
