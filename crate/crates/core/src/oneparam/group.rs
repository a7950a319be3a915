use serde::Serialize;

use crate::error::{Error, Result};
use crate::ultrametric::{project, FieldDescriptor, Lfe, ResidueRing};

/// Largest group order for which the multiplication table is materialized.
pub const MAX_GROUP_ORDER: usize = 4096;

/// The image of `1 + π^s·O_K` in `(O_K/π^{s_v})^*` for `K = 𝔽_{p^u}((θ))`, with its full
/// multiplication table.
#[derive(Clone, Debug)]
pub struct MultiplicativeBallGroup {
    pub field: FieldDescriptor,
    pub s: u32,
    pub s_v: u32,
    /// Residue indices modulo `θ^{s_v}`, increasing.
    pub elements: Vec<u64>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallGroupSummary {
    pub p: u32,
    pub u: u32,
    pub s: u32,
    pub s_v: u32,
    pub order: usize,
    pub exponent: u64,
    pub abelian: bool,
    pub elements: Vec<String>,
}

pub fn ball_group(s: u32, s_v: u32, p: u32, u: u32) -> Result<MultiplicativeBallGroup> {
    if s < 1 || s_v <= s {
        return Err(Error::InvalidArgument(format!("need s_v > s ≥ 1, got s = {s}, s_v = {s_v}")));
    }
    let field = FieldDescriptor::laurent(p, u)?;
    let q = field.q();
    let order = q.saturating_pow(s_v - s).min(usize::MAX as u64) as usize;
    if order > MAX_GROUP_ORDER {
        return Err(Error::CapacityExceeded { size: order, cap: MAX_GROUP_ORDER });
    }
    let ring = ResidueRing::new(field, s_v)?;
    let qs = q.pow(s);
    let elements: Vec<u64> = (0..order as u64).map(|k| 1 + qs * k).collect();
    let pos = |x: u64| ((x - 1) / qs) as usize;
    let table = elements.iter().map(|&a| elements.iter().map(|&b| pos(ring.mul(a, b))).collect()).collect();
    Ok(MultiplicativeBallGroup { field, s, s_v, elements, table, identity: 0 })
}

impl MultiplicativeBallGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    fn qs(&self) -> u64 {
        self.field.q().pow(self.s)
    }

    pub fn index_of(&self, x: u64) -> Option<usize> {
        let qs = self.qs();
        (x % qs == 1 % qs && x < self.field.q().pow(self.s_v)).then(|| ((x - 1) / qs) as usize)
    }

    /// Position of `π_{s_v}(x)` for `x ∈ 1 + π^s O_K`.
    pub fn index_of_element(&self, x: &Lfe) -> Result<usize> {
        if x.field() != self.field {
            return Err(Error::DescriptorMismatch(x.field().to_string(), self.field.to_string()));
        }
        let r = project(x, self.s_v)?;
        self.index_of(r).ok_or_else(|| Error::InvalidArgument(format!("{x} is not in 1 + t^{} O", self.s)))
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn pow(&self, a: usize, e: u64) -> usize {
        (0..e).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.pow(a, self.element_order(a) - 1)
    }

    pub fn exponent(&self) -> u64 {
        (0..self.order()).fold(1, |acc, a| num_integer::lcm(acc, self.element_order(a)))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Image of element `a` in the group of a lower truncation level with the same `s`.
    pub fn project_to(&self, a: usize, lower: &MultiplicativeBallGroup) -> Result<usize> {
        if lower.field != self.field || lower.s != self.s || lower.s_v > self.s_v {
            return Err(Error::Incompatible("groups are not related by truncation".into()));
        }
        Ok(lower.index_of(self.elements[a] % lower.field.q().pow(lower.s_v)).expect("truncation stays in the ball"))
    }

    /// The element as a polynomial in `t` of degree below `s_v`.
    pub fn label(&self, a: usize) -> String {
        let ring = ResidueRing { field: self.field, level: self.s_v };
        let fq = self.field.fq();
        let terms: Vec<String> = ring
            .digits(self.elements[a])
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let cs = match (self.field.u, c) {
                    (1, 1) => String::new(),
                    (1, _) => c.to_string(),
                    _ => format!("{:?}", fq.coefficients(c)),
                };
                match i {
                    0 => c.to_string(),
                    1 => format!("{cs}t"),
                    _ => format!("{cs}t^{i}"),
                }
            })
            .collect();
        terms.join("+")
    }

    pub fn summary(&self) -> BallGroupSummary {
        BallGroupSummary {
            p: self.field.p,
            u: self.field.u,
            s: self.s,
            s_v: self.s_v,
            order: self.order(),
            exponent: self.exponent(),
            abelian: self.is_abelian(),
            elements: (0..self.order()).map(|a| self.label(a)).collect(),
        }
    }
}
