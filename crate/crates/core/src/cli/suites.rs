use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use super::{record, CheckRecord, FixtureFile, RunConfig, Suite};
use crate::calculus::{chain_check, leibniz_check, leibniz_multi_check, CheckPoint, Domain, FnRepr};
use crate::error::{Error, Result};
use crate::fixtures::{self, FixtureRng};
use crate::loops::monoid_law_check;
use crate::mahler::{compose, evaluate, expand_poly_ints, identity_agreement, invert, stirling_tables, MahlerSeries};
use crate::oneparam::{additive_obstruction, ball_group, eta_construct, monomial_perturbation, DEGREE_BOUND};
use crate::tower::{
    commutator_decompose, commutator_product, default_sampler, functoriality_check, group_metric, witness_flat_polynomial, DiffRepr,
    LevelPermutation, Perm, WitnessSpec, METRIC_ORDER,
};
use crate::ultrametric::{binom_valuation_exponent, FieldDescriptor, Lfe};

type Outcome = Result<(bool, Option<i64>, Option<String>)>;

/// Runs every check of one suite.
pub fn run_one(suite: Suite, config: &RunConfig, fixtures: &FixtureFile) -> Vec<CheckRecord> {
    let rng = fixtures::rng(config.seed ^ (suite.number() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    match suite {
        Suite::Stirling => stirling(config),
        Suite::Mahler => mahler(config, fixtures, rng),
        Suite::Leibniz => leibniz(config, rng),
        Suite::Functoriality => functoriality(config, rng),
        Suite::Witness => witness(config),
        Suite::Invert => inversion(config, rng),
        Suite::Obstruction => obstruction(config, rng),
        Suite::Eta => eta(),
        Suite::Loops => loops(),
        Suite::Commutators => commutators(rng),
        Suite::Valuation => valuation(),
    }
}

fn padic(p: u32) -> FieldDescriptor {
    FieldDescriptor::padic(p).expect("prime")
}

fn laurent(p: u32) -> FieldDescriptor {
    FieldDescriptor::laurent(p, 1).expect("prime")
}

fn verdict(pass: bool, detail: impl FnOnce() -> String) -> Outcome {
    Ok((pass, None, (!pass).then(detail)))
}

/// `Σ_l S_{m,l} T_{l,j} = δ_{m,j}` and `Σ_l T_{m,l} S_{l,j} = δ_{m,j}` row by row.
fn stirling(config: &RunConfig) -> Vec<CheckRecord> {
    let size = config.precision as usize;
    let tables = match stirling_tables(size) {
        Ok(t) => t,
        Err(e) => return vec![record(Suite::Stirling, "tables".into(), "mahler", "stirling_tables", format!("size={size}"), || Err(e))],
    };
    let t = |a: usize, b: usize| BigRational::from_integer(tables.t[a][b].clone());
    let mut out = Vec::new();
    for (name, st) in [("ST", true), ("TS", false)] {
        for m in 0..=size {
            out.push(record(
                Suite::Stirling,
                format!("{name}/m={m:03}"),
                "mahler",
                "stirling_tables",
                format!("{name} size={size} m={m}"),
                || {
                    let bad = (0..=size).find(|&j| {
                        let sum: BigRational = (0..=size)
                            .map(|l| if st { &tables.s[m][l] * t(l, j) } else { t(m, l) * &tables.s[l][j] })
                            .fold(BigRational::zero(), |a, b| a + b);
                        sum != if m == j { BigRational::one() } else { BigRational::zero() }
                    });
                    verdict(bad.is_none(), || format!("entry ({m}, {}) differs from δ", bad.unwrap()))
                },
            ));
        }
    }
    out
}

fn horner_int(c: &[i64], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, &a| acc * x + a)
}

fn horner_lfe(c: &[i64], x: &Lfe) -> Lfe {
    let f = x.field();
    let prec = x.working_precision();
    c.iter().rev().fold(Lfe::zero_mod(f, prec), |acc, &a| &(&acc * x) + &Lfe::from_int(f, a, prec))
}

/// `evaluate(expand(f), x) = f(x)` at integer points (exact integer oracle) and p-adic points
/// (Horner oracle).
fn mahler(config: &RunConfig, extra: &FixtureFile, mut rng: FixtureRng) -> Vec<CheckRecord> {
    let prec = config.precision;
    let mut out = Vec::new();
    for p in [2u32, 3, 5] {
        let field = padic(p);
        let mut polys: Vec<Vec<i64>> = (0..200).map(|_| (0..=rng.gen_range(0..=8)).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        polys.extend(extra.polys.iter().cloned());
        for (i, c) in polys.iter().enumerate() {
            let ints: Vec<i64> = (0..25).map(|_| rng.gen_range(-1000..=1000)).collect();
            let adic: Vec<Lfe> = (0..25).map(|_| fixtures::integer(&mut rng, field, prec)).collect();
            out.push(record(
                Suite::Mahler,
                format!("p={p}/{i:04}"),
                "mahler",
                "expand+evaluate",
                format!("p={p} N={prec} f={c:?}"),
                || {
                    let s = expand_poly_ints(field, c, c.len().max(1) - 1, prec)?;
                    for &x in &ints {
                        let got = evaluate(&s, &Lfe::from_int(field, x, prec))?;
                        let want = Lfe::from_bigint(field, &horner_int(c, &BigInt::from(x)), prec);
                        if got != want {
                            return verdict(false, || format!("x={x}: {got} vs {want}"));
                        }
                    }
                    for x in &adic {
                        let got = evaluate(&s, x)?;
                        let want = horner_lfe(c, x);
                        if got != want {
                            return verdict(false, || format!("x={x}: {got} vs {want}"));
                        }
                    }
                    Ok((true, None, None))
                },
            ));
        }
    }
    out
}

fn check_outcome(r: crate::calculus::CheckReport) -> Outcome {
    let pass = r.pass && r.margin == 0;
    Ok((pass, Some(r.margin), (!pass).then(|| format!("lhs {:?} rhs {:?}", r.lhs, r.rhs))))
}

/// Product rule (`n ≤ 3`), `k`-factor product rule (`k ≤ 3`, `n ≤ 2`) and chain rule (`n ≤ 2`,
/// and `n = 3` for scalar maps of one variable) at points whose scalars are units.
fn leibniz(config: &RunConfig, mut rng: FixtureRng) -> Vec<CheckRecord> {
    let prec = config.precision.min(24);
    let mut out = Vec::new();
    for p in [2u32, 3] {
        let f = padic(p);
        for i in 0..100 {
            let n = 1 + i % 3;
            let g1 = fixtures::scalar_poly_fn(&mut rng, f, 1, 3, prec);
            let g2 = fixtures::scalar_poly_fn(&mut rng, f, 1, 3, prec);
            let pt = fixtures::phi_point(&mut rng, f, 1, n, prec);
            out.push(record(
                Suite::Leibniz,
                format!("product/p={p}/{i:03}"),
                "difference_calculus",
                "leibniz_check",
                format!("p={p} n={n} fixture={i}"),
                || check_outcome(leibniz_check(&g1, &g2, &CheckPoint::Phi(pt))?),
            ));
        }
        for i in 0..100 {
            let k = 2 + i % 2;
            let n = 1 + (i / 2) % 2;
            let gs: Vec<FnRepr> = (0..k).map(|_| fixtures::scalar_poly_fn(&mut rng, f, 1, 2, prec)).collect();
            let pt = fixtures::phi_point(&mut rng, f, 1, n, prec);
            out.push(record(
                Suite::Leibniz,
                format!("multi/p={p}/{i:03}"),
                "difference_calculus",
                "leibniz_multi_check",
                format!("p={p} k={k} n={n} fixture={i}"),
                || check_outcome(leibniz_multi_check(&gs, &CheckPoint::Phi(pt))?),
            ));
        }
        for i in 0..100 {
            let n = 1 + i % 3;
            let (outer, inner) = if n == 3 {
                let outer = fixtures::scalar_poly_fn(&mut rng, f, 1, 3, prec);
                let inner = FnRepr::polynomial(f, Domain::whole(1), vec![fixtures::polynomial(&mut rng, f, 1, 2, prec)]);
                (outer, inner)
            } else {
                let outer = FnRepr::scalar_poly(f, fixtures::polynomial(&mut rng, f, 2, 2, prec));
                let coords = (0..2).map(|_| fixtures::polynomial(&mut rng, f, 1, 2, prec)).collect();
                (outer, FnRepr::polynomial(f, Domain::whole(1), coords))
            };
            let pt = fixtures::phi_point(&mut rng, f, 1, n, prec);
            out.push(record(
                Suite::Leibniz,
                format!("chain/p={p}/{i:03}"),
                "difference_calculus",
                "chain_check",
                format!("p={p} n={n} fixture={i}"),
                || check_outcome(chain_check(&outer, &inner, &CheckPoint::Phi(pt))?),
            ));
        }
    }
    out
}

/// `(f∘g)_k = f_k∘g_k` and `(g⁻¹)_k = (g_k)⁻¹` for near-identity polynomial pairs.
fn functoriality(config: &RunConfig, mut rng: FixtureRng) -> Vec<CheckRecord> {
    let prec = config.precision.min(24);
    let mut out = Vec::new();
    for p in [2u32, 3] {
        let field = padic(p);
        for i in 0..50 {
            let f = fixtures::near_identity(&mut rng, field, 3, prec);
            let g = fixtures::near_identity(&mut rng, field, 3, prec);
            out.push(record(
                Suite::Functoriality,
                format!("p={p}/{i:02}"),
                "diffeo_tower",
                "functoriality_check",
                format!("p={p} pair={i} k=1..3"),
                || {
                    for k in 1..=3 {
                        let r = functoriality_check(&f, &g, k)?;
                        if !r.pass {
                            return verdict(false, || format!("level {k}: {r:?}"));
                        }
                    }
                    Ok((true, None, None))
                },
            ));
        }
    }
    out
}

/// The flat witness is the identity on every unit residue at its level yet stays at distance
/// at least `1/p` from the identity.
fn witness(config: &RunConfig) -> Vec<CheckRecord> {
    let prec = config.precision.max(16);
    [(3u32, 1u32), (5, 1), (5, 2)]
        .into_iter()
        .map(|(p, k)| {
            record(
                Suite::Witness,
                format!("p={p}/k={k}"),
                "diffeo_tower",
                "witness_flat_polynomial",
                format!("p={p} k={k} N={prec}"),
                || {
                    let field = padic(p);
                    let spec = WitnessSpec::default_for(field, k, prec);
                    let (g, proof) = witness_flat_polynomial(p, k, &spec, prec)?;
                    let id = DiffRepr::on_units(FnRepr::identity(field, Domain::units(field, prec), prec), prec, prec)?;
                    let sampler = default_sampler(&g, 2, 30)?;
                    let rho = group_metric(&id, &g, &sampler, METRIC_ORDER)?;
                    let pass = proof.level_identity && rho.to_f64() >= 1.0 / p as f64;
                    Ok((
                        pass,
                        rho.exp,
                        Some(format!("units checked {}, ρ = {}, moved {:?}", proof.units_checked, rho.to_f64(), proof.moved_point)),
                    ))
                },
            )
        })
        .collect()
}

/// Admissible series: `f_0 = 0`, `f_1 ≡ 1` and `f_j` divisible by `p^{1+⌊log_p j⌋}`.
pub(crate) fn admissible_series(rng: &mut FixtureRng, field: FieldDescriptor, k: usize, prec: i64) -> MahlerSeries {
    let p = field.p as i64;
    let mut c = vec![0, 1 + p * rng.gen_range(-2..=2)];
    for j in 2..=k as u32 {
        c.push(p.pow(1 + j.ilog(p as u32)) * rng.gen_range(-3..=3));
    }
    MahlerSeries::from_ints(field, &c, prec).expect("integer coefficients")
}

/// `compose(invert(f), f)` agrees with the identity series modulo `p^{N−4}`.
fn inversion(config: &RunConfig, mut rng: FixtureRng) -> Vec<CheckRecord> {
    let prec = config.precision;
    let k = 8;
    let mut out = Vec::new();
    for p in [2u32, 3, 5] {
        let field = padic(p);
        for i in 0..20 {
            let f = admissible_series(&mut rng, field, k, prec);
            out.push(record(Suite::Invert, format!("p={p}/{i:02}"), "mahler", "invert", format!("p={p} N={prec} K={k} f={f}"), || {
                let h = invert(&f, k)?;
                let round = compose(&h, &f, k)?;
                let agreement = identity_agreement(&round, k + 1);
                let margin = agreement - (prec - 4);
                Ok((margin >= 0, Some(margin), Some(format!("agreement p^{agreement}"))))
            }));
        }
    }
    out
}

/// `g = x + θx^l` over `𝔽_p((θ))`: `g^p ≠ id` and `|g^p(x) − x| ≤ ‖h‖²|x|` at sampled `x`.
fn obstruction(config: &RunConfig, mut rng: FixtureRng) -> Vec<CheckRecord> {
    let prec = config.precision;
    let mut out = Vec::new();
    for p in [2u32, 3] {
        let field = laurent(p);
        for l in 2..=4u32 {
            let xs: Vec<Lfe> = (0..100)
                .map(|i| if i % 2 == 0 { fixtures::integer(&mut rng, field, prec) } else { fixtures::unit(&mut rng, field, prec) })
                .collect();
            out.push(record(
                Suite::Obstruction,
                format!("p={p}/l={l}"),
                "one_param",
                "additive_obstruction",
                format!("p={p} l={l} N={prec} samples=100"),
                || {
                    let theta = Lfe::uniformizer(field, prec);
                    let g = monomial_perturbation(field, &theta, l, prec)?;
                    let r = additive_obstruction(&g, &xs, DEGREE_BOUND, prec)?;
                    let pass = !r.power_is_identity && r.bound_holds && r.samples == xs.len();
                    Ok((pass, r.worst_margin, Some(format!("g^p - id terms {:?}", r.terms))))
                },
            ));
        }
    }
    out
}

fn cycle_level(p: u32, j: u32) -> LevelPermutation {
    let m = (p as u64).pow(j);
    let points = (0..m).map(|i| vec![i]).collect();
    let cycle: Vec<u32> = (0..m as u32).collect();
    let perm = Perm::from_cycles(m as usize, &[cycle]).expect("one cycle");
    LevelPermutation { perm, ..LevelPermutation::identity(padic(p), j, points) }
}

/// `η` with `η(x₀) = σ` for every anchor `x₀` and every cycle `σ` of order `p^j` dividing the
/// order of `x₀`, on unit-ball groups of order at most 81.
fn eta() -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (p, max_depth) in [(2u32, 6u32), (3, 4)] {
        for s in 1..=2u32 {
            for depth in 1..=max_depth {
                let group = match ball_group(s, s + depth, p, 1) {
                    Ok(g) => Arc::new(g),
                    Err(e) => {
                        out.push(record(Suite::Eta, format!("p={p}/s={s}/d={depth}"), "one_param", "ball_group", String::new(), || Err(e)));
                        continue;
                    }
                };
                for x0 in (0..group.order()).filter(|&x| x != group.identity) {
                    let ord = group.element_order(x0);
                    for j in (1..).take_while(|&j| ord % (p as u64).pow(j) == 0) {
                        let sigma = cycle_level(p, j);
                        let inputs = format!("p={p} s={s} s_v={} x0={} σ=({}-cycle)", s + depth, group.label(x0), p.pow(j));
                        let group = Arc::clone(&group);
                        out.push(record(
                            Suite::Eta,
                            format!("p={p}/s={s}/d={depth}/x={x0:03}/j={j}"),
                            "one_param",
                            "eta_construct",
                            inputs,
                            || {
                                let level = eta_construct(&sigma, x0, group)?;
                                let c = level.check_conditions();
                                verdict(c.holds, || format!("{c:?}"))
                            },
                        ));
                    }
                }
            }
        }
    }
    out
}

fn loops() -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for m in 1..=5 {
        for n in 1..=4 {
            out.push(record(Suite::Loops, format!("m={m}/n={n}"), "loop_monoid", "monoid_law_check", format!("|M|={m} |N|={n}"), || {
                let r = monoid_law_check(m, n)?;
                verdict(r.holds, || format!("{r:?}"))
            }));
        }
    }
    out
}

fn random_even(rng: &mut FixtureRng, n: usize) -> Perm {
    let mut images: Vec<u32> = (0..n as u32).collect();
    images.shuffle(rng);
    let perm = Perm::from_images(images).expect("shuffle");
    if perm.is_even() {
        perm
    } else {
        perm.compose(&Perm::transposition(n, 0, 1))
    }
}

fn commutators(mut rng: FixtureRng) -> Vec<CheckRecord> {
    (5..=9usize)
        .map(|n| {
            let perms: Vec<Perm> = (0..500).map(|_| random_even(&mut rng, n)).collect();
            record(Suite::Commutators, format!("n={n}"), "diffeo_tower", "commutator_decompose", format!("n={n} count=500"), || {
                let mut most = 0;
                for sigma in &perms {
                    let pairs = commutator_decompose(sigma)?;
                    most = most.max(pairs.len());
                    if commutator_product(n, &pairs) != *sigma {
                        return verdict(false, || format!("product differs from {sigma}"));
                    }
                }
                Ok((true, None, Some(format!("at most {most} commutators"))))
            })
        })
        .collect()
}

fn brute_valuation(mut x: BigInt, p: u32) -> u64 {
    let mut v = 0;
    let p = BigInt::from(p);
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

/// `v_p(C(k, q))` against Pascal's triangle in exact integers.
fn valuation() -> Vec<CheckRecord> {
    [2u32, 3, 5, 7]
        .into_iter()
        .map(|p| {
            record(Suite::Valuation, format!("p={p}"), "ultrametric_core", "binom_valuation", format!("p={p} k<=500"), || {
                let mut row = vec![BigInt::one()];
                for k in 0..=500u64 {
                    for (q, c) in row.iter().enumerate() {
                        let got = binom_valuation_exponent(k, q as u64, p)?;
                        let want = brute_valuation(c.clone(), p);
                        if got != want {
                            return Err(Error::Mismatch(format!("v_{p}(C({k},{q})) = {want}, got {got}")));
                        }
                    }
                    let mut next = vec![BigInt::one(); row.len() + 1];
                    for q in 1..row.len() {
                        next[q] = &row[q - 1] + &row[q];
                    }
                    row = next;
                }
                Ok((true, None, None))
            })
        })
        .collect()
}
