use std::sync::Arc;

use super::diff::DiffRepr;
use crate::calculus::{cnb_norm, Ball, Flavor, FnRepr, Sampler};
use crate::error::{Error, Result};
use crate::ultrametric::{Lfe, Norm, ResidueRing};

/// Order of the difference quotients entering the group metric.
pub const METRIC_ORDER: usize = 1;

/// Representatives of the level-`k` classes of the domain of `g` (at most `max_points`),
/// unit directions and the scalars `π, π², 1`.
pub fn default_sampler(g: &DiffRepr, k: u32, max_points: usize) -> Result<Sampler> {
    let field = g.field();
    let ring = ResidueRing::new(field, k)?;
    let classes = g.residue_classes(k)?;
    let step = classes.len().div_ceil(max_points.max(1)).max(1);
    let points = classes.iter().step_by(step).map(|c| c.iter().map(|&d| ring.lift(d, g.prec)).collect()).collect();
    let n = g.dim();
    let zero = Lfe::zero_mod(field, g.prec);
    let one = Lfe::one(field, g.prec);
    let directions = (0..n).map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect();
    let pi = Lfe::uniformizer(field, g.prec);
    let scalars = vec![pi.clone(), &pi * &pi, one];
    Ok(Sampler { points, directions, scalars, flavor: Flavor::Phi, limit: 4096 })
}

/// `ρ(f, g) = ‖id − f⁻¹∘g‖`, the sampled `C^n_b` norm of order `order`.
pub fn group_metric(f: &DiffRepr, g: &DiffRepr, sampler: &Sampler, order: usize) -> Result<Norm> {
    let h = f.inverse().compose(g);
    let field = h.field();
    let one = Lfe::one(field, h.prec);
    let id = FnRepr::identity(field, h.map.domain.clone(), h.prec);
    let diff = id.linear_combination(&one, &h.map, &-&one);
    cnb_norm(&diff, order, sampler)
}

fn disjoint(a: &Ball, b: &Ball) -> bool {
    !a.contains(&b.center) && !b.contains(&a.center)
}

fn agree(a: &[Lfe], b: &[Lfe]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).is_zero())
}

/// Splits `g` into factors `h_j` that agree with `g` on ball `j` of `cover` and are the identity
/// elsewhere. Checks on representatives that `g` preserves every ball, that the factors commute
/// and that their composite is `g`.
pub fn ball_decompose(g: &DiffRepr, cover: &[Ball]) -> Result<Vec<DiffRepr>> {
    if cover.is_empty() || cover.iter().any(|b| b.center.len() != g.dim()) {
        return Err(Error::InvalidArgument("cover must be a nonempty family of balls in K^n".into()));
    }
    for (i, a) in cover.iter().enumerate() {
        for b in &cover[i + 1..] {
            if !disjoint(a, b) {
                return Err(Error::InvalidArgument("cover balls overlap".into()));
            }
        }
    }
    let level = cover.iter().chain(&g.balls).map(|b| b.radius_exp).max().unwrap_or(0).max(1) as u32 + 1;
    let ring = ResidueRing::new(g.field(), level)?;
    let reps: Vec<Vec<Lfe>> = g.residue_classes(level)?.iter().map(|c| c.iter().map(|&d| ring.lift(d, g.prec)).collect()).collect();
    for x in &reps {
        let owners: Vec<usize> = (0..cover.len()).filter(|&j| cover[j].contains(x)).collect();
        let [j] = owners[..] else {
            return Err(Error::InvalidArgument(format!("{} cover balls contain a point of M", owners.len())));
        };
        let y = g.eval(x)?;
        if !cover[j].contains(&y) {
            return Err(Error::BallNotPreserved(format!(
                "g moves {} out of cover ball {j}",
                x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
    }
    if cover.len() == 1 {
        return Ok(vec![g.clone()]);
    }
    let factors: Vec<DiffRepr> = cover
        .iter()
        .map(|ball| {
            let ball = ball.clone();
            let inner = g.map.clone();
            let eval = move |x: &[Lfe]| if ball.contains(x) { inner.eval(x) } else { Ok(x.to_vec()) };
            let map = FnRepr::opaque(g.field(), g.map.domain.clone(), g.dim(), g.map.class, Arc::new(eval));
            DiffRepr { map, balls: g.balls.clone(), s: g.s, prec: g.prec }
        })
        .collect();
    for x in &reps {
        let gx = g.eval(x)?;
        let mut y = x.clone();
        for h in factors.iter().rev() {
            y = h.eval(&y)?;
        }
        if !agree(&y, &gx) {
            return Err(Error::Mismatch("composite of the factors differs from g".into()));
        }
        for (i, a) in factors.iter().enumerate() {
            for b in &factors[i + 1..] {
                if !agree(&a.eval(&b.eval(x)?)?, &b.eval(&a.eval(x)?)?) {
                    return Err(Error::Mismatch("factors with disjoint supports do not commute".into()));
                }
            }
        }
    }
    Ok(factors)
}
