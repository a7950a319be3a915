use serde::Serialize;

use super::diff::{level_project, DiffRepr, LevelPermutation, Sampling};
use crate::error::{Error, Result};

/// Compatible level permutations `σ_{k₀}, …, σ_K` on consecutive levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermThread {
    pub levels: Vec<LevelPermutation>,
}

fn reduce(x: &[u64], modulus: u64) -> Vec<u64> {
    x.iter().map(|c| c % modulus).collect()
}

/// `π^{l}_{k} ∘ σ_l = σ_k ∘ π^{l}_{k}` for consecutive levels `k = l − 1`.
pub fn check_pair(lower: &LevelPermutation, upper: &LevelPermutation) -> Result<()> {
    if upper.level != lower.level + 1 || upper.field != lower.field {
        return Err(Error::Incompatible(format!("levels {} and {} are not consecutive", lower.level, upper.level)));
    }
    let modulus = lower.field.q().pow(lower.level);
    for x in &upper.points {
        let px = reduce(x, modulus);
        let up = upper.image(x).expect("point of the upper level");
        let down = lower.image(&px).ok_or_else(|| Error::Incompatible(format!("{x:?} projects to {px:?}, outside M_{}", lower.level)))?;
        if reduce(up, modulus) != down {
            return Err(Error::Incompatible(format!(
                "element {x:?} at level {}: π(σ(x)) = {:?} but σ(π(x)) = {down:?}",
                upper.level,
                reduce(up, modulus)
            )));
        }
    }
    Ok(())
}

impl PermThread {
    pub fn new(levels: Vec<LevelPermutation>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidArgument("a thread needs at least one level".into()));
        }
        let t = PermThread { levels };
        thread_check(&t)?;
        Ok(t)
    }

    pub fn bottom(&self) -> u32 {
        self.levels[0].level
    }

    pub fn top(&self) -> u32 {
        self.levels.last().expect("nonempty thread").level
    }

    pub fn at(&self, k: u32) -> Option<&LevelPermutation> {
        k.checked_sub(self.bottom()).and_then(|i| self.levels.get(i as usize))
    }

    /// Level-wise `self ∘ other`.
    pub fn compose(&self, other: &PermThread) -> Result<PermThread> {
        if self.bottom() != other.bottom() || self.top() != other.top() {
            return Err(Error::ShapeMismatch("threads span different levels".into()));
        }
        let levels = self.levels.iter().zip(&other.levels).map(|(a, b)| a.compose(b)).collect::<Result<_>>()?;
        Ok(PermThread { levels })
    }

    pub fn inverse(&self) -> PermThread {
        PermThread { levels: self.levels.iter().map(|l| l.inverse()).collect() }
    }

    /// Parity of each level, which need not be constant along the thread.
    pub fn parities(&self) -> Vec<bool> {
        self.levels.iter().map(|l| l.is_even()).collect()
    }
}

pub fn thread_check(t: &PermThread) -> Result<()> {
    t.levels.windows(2).try_for_each(|w| check_pair(&w[0], &w[1]))
}

pub fn thread_extend(t: &PermThread, sigma: LevelPermutation) -> Result<PermThread> {
    let top = t.levels.last().ok_or_else(|| Error::InvalidArgument("empty thread".into()))?;
    check_pair(top, &sigma)?;
    let mut levels = t.levels.clone();
    levels.push(sigma);
    Ok(PermThread { levels })
}

/// The thread `g_{k₀}, …, g_K` of level permutations induced by `g`.
pub fn thread_of(g: &DiffRepr, k0: u32, top: u32, sampling: Sampling) -> Result<PermThread> {
    if k0 == 0 || top < k0 {
        return Err(Error::InvalidArgument(format!("bad level range {k0}..={top}")));
    }
    let levels = (k0..=top).map(|k| level_project(g, k, sampling)).collect::<Result<_>>()?;
    PermThread::new(levels)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationReport {
    pub levels: Vec<u32>,
    /// `ψ_v = h_v g_v h_v⁻¹` in cycle notation.
    pub psi: Vec<String>,
    pub parities: Vec<bool>,
    pub compatible: bool,
}

/// Checks that `ψ_v = h_v ∘ g_v ∘ h_v⁻¹` is a compatible thread on the levels of `h` up to `top`.
pub fn conjugation_thread(h: &PermThread, g: &DiffRepr, top: u32) -> Result<(PermThread, ConjugationReport)> {
    thread_check(h)?;
    if top < h.bottom() || top > h.top() {
        return Err(Error::InvalidArgument(format!("level {top} is outside the thread {}..={}", h.bottom(), h.top())));
    }
    let gt = thread_of(g, h.bottom(), top, Sampling::default())?;
    let levels = gt
        .levels
        .iter()
        .map(|gv| {
            let hv = h.at(gv.level).expect("level inside the thread");
            hv.compose(gv)?.compose(&hv.inverse())
        })
        .collect::<Result<Vec<_>>>()?;
    let psi = PermThread { levels };
    let compatible = thread_check(&psi).is_ok();
    let report = ConjugationReport {
        levels: psi.levels.iter().map(|l| l.level).collect(),
        psi: psi.levels.iter().map(|l| l.to_string()).collect(),
        parities: psi.parities(),
        compatible,
    };
    Ok((psi, report))
}
