use std::fmt;

use serde::Serialize;

use super::monoid::LoopClass;
use crate::error::{Error, Result};

/// An element of the Grothendieck group of `Ω(M, N)`: integer multiplicities indexed by
/// `N ∖ {y₀}` in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LoopGroupElement {
    pub n: usize,
    pub y0: usize,
    pub coords: Vec<i64>,
}

impl LoopGroupElement {
    pub fn zero(n: usize, y0: usize) -> Self {
        LoopGroupElement { n, y0, coords: vec![0; n - 1] }
    }

    pub fn from_coords(n: usize, y0: usize, coords: Vec<i64>) -> Result<Self> {
        if y0 >= n || coords.len() != n - 1 {
            return Err(Error::ShapeMismatch(format!("{} coordinates for a pointed set of size {n}", coords.len())));
        }
        Ok(LoopGroupElement { n, y0, coords })
    }

    /// Position of value `v ≠ y₀` among the coordinates.
    pub fn slot(&self, v: usize) -> usize {
        if v < self.y0 {
            v
        } else {
            v - 1
        }
    }

    /// The value of `N` labelling coordinate `i`.
    pub fn value(&self, i: usize) -> usize {
        if i < self.y0 {
            i
        } else {
            i + 1
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.n, self.y0) != (other.n, other.y0) {
            return Err(Error::Incompatible("group elements over different pointed sets".into()));
        }
        Ok(LoopGroupElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(), ..self.clone() })
    }

    pub fn neg(&self) -> Self {
        LoopGroupElement { coords: self.coords.iter().map(|a| -a).collect(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for LoopGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// Multiplicity vector of a class.
pub fn grothendieck(a: &LoopClass) -> LoopGroupElement {
    let mut g = LoopGroupElement::zero(a.n, a.y0);
    for &v in &a.values {
        let i = g.slot(v);
        g.coords[i] += 1;
    }
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub n: usize,
    pub rank: usize,
    /// `card(N)`, the rank asserted for the completed group.
    pub claimed_rank: usize,
    pub discrepancy: bool,
}

/// Rank of the group completion for `|N| = n`; the basepoint value contributes no generator.
pub fn group_rank(n: usize) -> RankReport {
    let rank = n.saturating_sub(1);
    RankReport { n, rank, claimed_rank: n, discrepancy: rank != n }
}
