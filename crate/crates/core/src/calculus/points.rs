use crate::error::{Error, Result};
use crate::ultrametric::Lfe;

/// A point `(x; v_1..v_n; t_1..t_n)` of the domain of `Φⁿ f`.
#[derive(Clone, Debug)]
pub struct PhiPoint {
    pub x: Vec<Lfe>,
    pub v: Vec<Vec<Lfe>>,
    pub t: Vec<Lfe>,
}

impl PhiPoint {
    pub fn new(x: Vec<Lfe>, v: Vec<Vec<Lfe>>, t: Vec<Lfe>) -> Result<Self> {
        if v.len() != t.len() || v.iter().any(|vi| vi.len() != x.len()) {
            return Err(Error::ShapeMismatch(format!(
                "{} directions and {} scalars at a point of dimension {}",
                v.len(),
                t.len(),
                x.len()
            )));
        }
        Ok(PhiPoint { x, v, t })
    }

    pub fn order(&self) -> usize {
        self.t.len()
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The same point with the last direction and scalar dropped.
    pub fn truncated(&self, k: usize) -> PhiPoint {
        PhiPoint { x: self.x.clone(), v: self.v[..k].to_vec(), t: self.t[..k].to_vec() }
    }
}

pub(crate) fn axpy(x: &[Lfe], t: &Lfe, v: &[Lfe]) -> Vec<Lfe> {
    x.iter().zip(v).map(|(a, b)| a + &(t * b)).collect()
}

/// A point of `U^{[n]}`: `x^{[k]} = (x^{[k−1]}, v^{[k−1]}, t_k)` with `v^{[k−1]}` of the same shape as `x^{[k−1]}`.
#[derive(Clone, Debug)]
pub enum UpsilonPoint {
    Base(Vec<Lfe>),
    Step { base: Box<UpsilonPoint>, dir: Box<UpsilonPoint>, t: Lfe },
}

impl UpsilonPoint {
    pub fn step(base: UpsilonPoint, dir: UpsilonPoint, t: Lfe) -> Result<Self> {
        if base.level() != dir.level() || base.dim() != dir.dim() {
            return Err(Error::ShapeMismatch("base and direction of an Υ-point must share their shape".into()));
        }
        Ok(UpsilonPoint::Step { base: Box::new(base), dir: Box::new(dir), t })
    }

    pub fn level(&self) -> usize {
        match self {
            UpsilonPoint::Base(_) => 0,
            UpsilonPoint::Step { base, .. } => base.level() + 1,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            UpsilonPoint::Base(x) => x.len(),
            UpsilonPoint::Step { base, .. } => base.dim(),
        }
    }

    /// `self + s·other`, slot by slot (scalar slots included).
    pub fn axpy(&self, s: &Lfe, other: &UpsilonPoint) -> Result<UpsilonPoint> {
        match (self, other) {
            (UpsilonPoint::Base(x), UpsilonPoint::Base(y)) if x.len() == y.len() => Ok(UpsilonPoint::Base(axpy(x, s, y))),
            (UpsilonPoint::Step { base: b1, dir: d1, t: t1 }, UpsilonPoint::Step { base: b2, dir: d2, t: t2 }) => {
                Ok(UpsilonPoint::Step { base: Box::new(b1.axpy(s, b2)?), dir: Box::new(d1.axpy(s, d2)?), t: t1 + &(s * t2) })
            }
            _ => Err(Error::ShapeMismatch("Υ-points of different shapes".into())),
        }
    }

    /// Points of X in canonical order: those of the base, then those of the direction.
    pub fn x_slots(&self) -> Vec<&Vec<Lfe>> {
        match self {
            UpsilonPoint::Base(x) => vec![x],
            UpsilonPoint::Step { base, dir, .. } => {
                let mut v = base.x_slots();
                v.extend(dir.x_slots());
                v
            }
        }
    }

    /// Scalars in canonical order: those of the base, those of the direction, then `t`.
    pub fn scalar_slots(&self) -> Vec<&Lfe> {
        match self {
            UpsilonPoint::Base(_) => Vec::new(),
            UpsilonPoint::Step { base, dir, t } => {
                let mut v = base.scalar_slots();
                v.extend(dir.scalar_slots());
                v.push(t);
                v
            }
        }
    }

    /// All coordinates: X slots flattened coordinate-wise, followed by the scalar slots.
    pub fn flatten(&self) -> Vec<Lfe> {
        let mut out: Vec<Lfe> = self.x_slots().into_iter().flat_map(|x| x.iter().cloned()).collect();
        out.extend(self.scalar_slots().into_iter().cloned());
        out
    }

    /// Inverse of [`UpsilonPoint::x_slots`] / [`UpsilonPoint::scalar_slots`].
    pub fn from_slots(level: usize, xs: &[Vec<Lfe>], ss: &[Lfe]) -> Result<Self> {
        let (m, s) = (1usize << level, (1usize << level) - 1);
        if xs.len() != m || ss.len() != s {
            return Err(Error::ShapeMismatch(format!("level {level} needs {m} points and {s} scalars")));
        }
        if level == 0 {
            return Ok(UpsilonPoint::Base(xs[0].clone()));
        }
        let (hm, hs) = (m / 2, (s - 1) / 2);
        let base = Self::from_slots(level - 1, &xs[..hm], &ss[..hs])?;
        let dir = Self::from_slots(level - 1, &xs[hm..], &ss[hs..2 * hs])?;
        Self::step(base, dir, ss[s - 1].clone())
    }

    /// A point of the given shape with every slot equal to `zero`.
    pub fn zeros(level: usize, dim: usize, zero: &Lfe) -> Self {
        if level == 0 {
            return UpsilonPoint::Base(vec![zero.clone(); dim]);
        }
        let z = Self::zeros(level - 1, dim, zero);
        UpsilonPoint::Step { base: Box::new(z.clone()), dir: Box::new(z), t: zero.clone() }
    }

    /// The image of a Φ-point in `U^{[n]}`: `x` in slot 0, `v_k` and `t_k` in the slots of
    /// [`note2_table`], every other slot zero.
    pub fn embed(pt: &PhiPoint) -> Self {
        let zero = pt.x.first().map(|c| Lfe::zero_mod(c.field(), c.working_precision())).expect("nonempty point");
        let mut cur = UpsilonPoint::Base(pt.x.clone());
        for (k, (v, t)) in pt.v.iter().zip(&pt.t).enumerate() {
            let mut dir = Self::zeros(k, pt.dim(), &zero);
            *dir.innermost_mut() = v.clone();
            cur = UpsilonPoint::Step { base: Box::new(cur), dir: Box::new(dir), t: t.clone() };
        }
        cur
    }

    fn innermost_mut(&mut self) -> &mut Vec<Lfe> {
        match self {
            UpsilonPoint::Base(x) => x,
            UpsilonPoint::Step { base, .. } => base.innermost_mut(),
        }
    }

    /// Reads the Φ-point back when every slot outside the table is zero.
    pub fn restrict(&self) -> Option<PhiPoint> {
        let n = self.level();
        let table = note2_table(n);
        let xs = self.x_slots();
        let ss = self.scalar_slots();
        let is_zero_slot = |x: &Vec<Lfe>| x.iter().all(|c| c.is_zero());
        for (i, x) in xs.iter().enumerate() {
            if i != table.x_slot && !table.v_slots.contains(&i) && !is_zero_slot(x) {
                return None;
            }
        }
        for (i, s) in ss.iter().enumerate() {
            if !table.t_slots.contains(&i) && !s.is_zero() {
                return None;
            }
        }
        PhiPoint::new(
            xs[table.x_slot].clone(),
            table.v_slots.iter().map(|&i| xs[i].clone()).collect(),
            table.t_slots.iter().map(|&i| ss[i].clone()).collect(),
        )
        .ok()
    }
}

/// Positions of `x`, `v_k` and `t_k` among the `2ⁿ` X-slots and `2ⁿ − 1` scalar slots of `U^{[n]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Note2Table {
    pub level: usize,
    pub x_slots: usize,
    pub scalar_slots: usize,
    pub x_slot: usize,
    pub v_slots: Vec<usize>,
    pub t_slots: Vec<usize>,
}

pub fn note2_table(n: usize) -> Note2Table {
    Note2Table {
        level: n,
        x_slots: 1 << n,
        scalar_slots: (1 << n) - 1,
        x_slot: 0,
        v_slots: (1..=n).map(|k| 1 << (k - 1)).collect(),
        t_slots: (1..=n).map(|k| (1 << k) - 2).collect(),
    }
}
