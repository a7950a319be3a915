use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::error::Error;
use crate::fixtures;
use crate::poly::MPoly;
use crate::ultrametric::{FieldDescriptor, Lfe, Norm};

const N: i64 = 24;

fn qp(p: u32) -> FieldDescriptor {
    FieldDescriptor::padic(p).unwrap()
}

fn int(f: FieldDescriptor, n: i64) -> Lfe {
    Lfe::from_int(f, n, N)
}

/// `Σ c_i x^i` in one variable.
fn upoly(f: FieldDescriptor, c: &[i64]) -> MPoly<Lfe> {
    MPoly::from_terms(1, c.iter().enumerate().filter(|(_, &a)| a != 0).map(|(i, &a)| (vec![i as u32], int(f, a))))
}

fn monomial(f: FieldDescriptor, m: usize, e: &[u32], c: i64) -> MPoly<Lfe> {
    MPoly::from_terms(m, vec![(e.to_vec(), int(f, c))])
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_to_lfe(f: FieldDescriptor, r: &BigRational) -> Lfe {
    Lfe::from_rational(f, r.numer(), r.denom(), N).unwrap()
}

/// Υ-point over ℚ used by the direct-recursion oracle.
#[derive(Clone)]
enum RPoint {
    Base(Vec<BigRational>),
    Step(Box<RPoint>, Box<RPoint>, BigRational),
}

impl RPoint {
    fn axpy(&self, s: &BigRational, o: &RPoint) -> RPoint {
        match (self, o) {
            (RPoint::Base(x), RPoint::Base(y)) => RPoint::Base(x.iter().zip(y).map(|(a, b)| a + s * b).collect()),
            (RPoint::Step(b1, d1, t1), RPoint::Step(b2, d2, t2)) => {
                RPoint::Step(Box::new(b1.axpy(s, b2)), Box::new(d1.axpy(s, d2)), t1 + s * t2)
            }
            _ => unreachable!(),
        }
    }

    fn to_lfe(&self, f: FieldDescriptor) -> UpsilonPoint {
        match self {
            RPoint::Base(x) => UpsilonPoint::Base(x.iter().map(|c| rat_to_lfe(f, c)).collect()),
            RPoint::Step(b, d, t) => UpsilonPoint::step(b.to_lfe(f), d.to_lfe(f), rat_to_lfe(f, t)).unwrap(),
        }
    }
}

fn upsilon_rational(f: &dyn Fn(&[BigRational]) -> BigRational, pt: &RPoint) -> BigRational {
    match pt {
        RPoint::Base(x) => f(x),
        RPoint::Step(b, d, t) => (upsilon_rational(f, &b.axpy(t, d)) - upsilon_rational(f, b)) / t,
    }
}

/// Random integral Υ-point whose scalars are nonzero integers prime to `p`.
fn random_rpoint(rng: &mut fixtures::FixtureRng, p: i64, m: usize, n: usize) -> RPoint {
    if n == 0 {
        return RPoint::Base((0..m).map(|_| rat(rng.gen_range(-20..=20))).collect());
    }
    let b = random_rpoint(rng, p, m, n - 1);
    let d = random_rpoint(rng, p, m, n - 1);
    let t = loop {
        let t: i64 = rng.gen_range(-30..=30);
        if t % p != 0 {
            break t;
        }
    };
    RPoint::Step(Box::new(b), Box::new(d), rat(t))
}

fn rpoly(c: &[i64]) -> impl Fn(&[BigRational]) -> BigRational + '_ {
    move |x| c.iter().rev().fold(BigRational::zero(), |acc, &a| acc * &x[0] + rat(a))
}

#[test]
fn phi_examples() {
    let q5 = qp(5);
    let sq = FnRepr::scalar_poly(q5, upoly(q5, &[0, 0, 1]));
    let pt = PhiPoint::new(vec![int(q5, 1)], vec![vec![int(q5, 1)]], vec![int(q5, 1)]).unwrap();
    assert_eq!(phi_eval(&sq, &pt).unwrap(), vec![int(q5, 3)]);

    let c = FnRepr::scalar_poly(q5, upoly(q5, &[7]));
    let pt = PhiPoint::new(vec![int(q5, 4)], vec![vec![int(q5, 2)]], vec![int(q5, 3)]).unwrap();
    assert!(phi_eval(&c, &pt).unwrap()[0].is_zero());

    let q2 = qp(2);
    let cube = FnRepr::scalar_poly(q2, upoly(q2, &[0, 0, 0, 1]));
    let pt = PhiPoint::new(vec![int(q2, 1)], vec![vec![int(q2, 1)]], vec![int(q2, 2)]).unwrap();
    let v = phi_eval(&cube, &pt).unwrap().swap_remove(0);
    assert_eq!(v, int(q2, 13));
    assert_eq!(v.precision(), Some(N - 1));
}

#[test]
fn phi_errors() {
    let q3 = qp(3);
    let f = FnRepr::scalar_poly(q3, upoly(q3, &[0, 1]));
    let dirs = vec![vec![int(q3, 1)]; MAX_ORDER + 1];
    let pt = PhiPoint::new(vec![int(q3, 0)], dirs.clone(), vec![int(q3, 1); MAX_ORDER + 1]).unwrap();
    assert!(matches!(phi_eval(&f, &pt), Err(Error::BoundExceeded(_))));

    let ball = FnRepr::polynomial(q3, Domain::unit_ball(q3, 1, N), vec![upoly(q3, &[0, 1])]);
    let pt =
        PhiPoint::new(vec![int(q3, 1)], vec![vec![int(q3, 1)]], vec![Lfe::from_rational(q3, &1.into(), &3.into(), N).unwrap()]).unwrap();
    assert!(matches!(phi_eval(&ball, &pt), Err(Error::DomainViolation(_))));

    let deep = Lfe::one(q3, 4).shift(6);
    let pt = PhiPoint::new(vec![Lfe::one(q3, 4)], vec![vec![Lfe::one(q3, 4)]], vec![deep]).unwrap();
    let opaque = FnRepr::opaque(q3, Domain::whole(1), 1, Smoothness::C(1), Arc::new(|x| Ok(vec![x[0].clone()])));
    assert!(matches!(phi_eval(&opaque, &pt), Err(Error::PrecisionExhausted(_))));
    assert!(PhiPoint::new(vec![int(q3, 1)], vec![vec![int(q3, 1)]], vec![]).is_err());
}

#[test]
fn phi_continuous_extension_at_zero() {
    let q3 = qp(3);
    let cube = FnRepr::scalar_poly(q3, upoly(q3, &[0, 0, 0, 1]));
    let pt = PhiPoint::new(vec![int(q3, 2)], vec![vec![int(q3, 1)]], vec![Lfe::zero(q3)]).unwrap();
    assert_eq!(phi_eval(&cube, &pt).unwrap()[0], int(q3, 12));

    let opaque = FnRepr::opaque(q3, Domain::whole(1), 1, Smoothness::C(2), Arc::new(|x| Ok(vec![&(&x[0] * &x[0]) * &x[0]])));
    let approx = phi_eval(&opaque, &pt).unwrap().swap_remove(0);
    assert!(approx.eq_mod(&int(q3, 12), N / 2));
}

#[test]
fn upsilon_first_order_matches_phi() {
    let mut rng = fixtures::rng(11);
    for p in [2, 3, 5] {
        let f = qp(p);
        for _ in 0..100 {
            let g = fixtures::scalar_poly_fn(&mut rng, f, 1, 5, N);
            let pt = fixtures::phi_point(&mut rng, f, 1, 1, N);
            let up = UpsilonPoint::step(UpsilonPoint::Base(pt.x.clone()), UpsilonPoint::Base(pt.v[0].clone()), pt.t[0].clone()).unwrap();
            assert_eq!(upsilon_eval(&g, &up).unwrap(), phi_eval(&g, &pt).unwrap());
        }
    }
}

#[test]
fn upsilon_of_identity_is_direction() {
    let mut rng = fixtures::rng(12);
    let f = qp(3);
    let id = FnRepr::identity(f, Domain::whole(2), N);
    for _ in 0..20 {
        let pt = fixtures::upsilon_point(&mut rng, f, 2, 1, N);
        let UpsilonPoint::Step { dir, .. } = &pt else { unreachable!() };
        assert_eq!(&upsilon_eval(&id, &pt).unwrap(), dir.x_slots()[0]);
    }
}

#[test]
fn upsilon_matches_rational_recursion() {
    let mut rng = fixtures::rng(13);
    let coeffs = [0, 0, 1];
    let oracle = rpoly(&coeffs);
    for p in [2u32, 3, 7] {
        let f = qp(p);
        let g = FnRepr::scalar_poly(f, upoly(f, &coeffs));
        for n in 1..=3 {
            let rp = random_rpoint(&mut rng, p as i64, 1, n);
            let expected = rat_to_lfe(f, &upsilon_rational(&oracle, &rp));
            assert_eq!(upsilon_eval(&g, &rp.to_lfe(f)).unwrap()[0], expected);
        }
    }
    let coeffs = [3, -1, 0, 2, 1];
    let oracle = rpoly(&coeffs);
    let f = qp(5);
    let g = FnRepr::scalar_poly(f, upoly(f, &coeffs));
    for _ in 0..20 {
        let rp = random_rpoint(&mut rng, 5, 1, 2);
        assert_eq!(upsilon_eval(&g, &rp.to_lfe(f)).unwrap()[0], rat_to_lfe(f, &upsilon_rational(&oracle, &rp)));
    }
}

#[test]
fn upsilon_symbolic_fallback_agrees_with_recursion_nearby() {
    let mut rng = fixtures::rng(14);
    let f = qp(3);
    let g = fixtures::scalar_poly_fn(&mut rng, f, 2, 4, N);
    let pt = fixtures::upsilon_point(&mut rng, f, 2, 2, N);
    let mut ss: Vec<Lfe> = pt.scalar_slots().into_iter().cloned().collect();
    let xs: Vec<Vec<Lfe>> = pt.x_slots().into_iter().cloned().collect();
    ss[0] = Lfe::zero(f);
    let at_zero = upsilon_eval(&g, &UpsilonPoint::from_slots(2, &xs, &ss).unwrap()).unwrap();
    ss[0] = Lfe::one(f, N).shift(10);
    let nearby = upsilon_eval(&g, &UpsilonPoint::from_slots(2, &xs, &ss).unwrap()).unwrap();
    assert!(at_zero[0].eq_mod(&nearby[0], 10));
}

#[test]
fn note2_table_positions() {
    let t = note2_table(3);
    assert_eq!((t.x_slots, t.scalar_slots), (8, 7));
    assert_eq!(t.x_slot, 0);
    assert_eq!(t.v_slots, vec![1, 2, 4]);
    assert_eq!(t.t_slots, vec![0, 2, 6]);

    let mut rng = fixtures::rng(15);
    let f = qp(2);
    let pt = fixtures::phi_point(&mut rng, f, 2, 3, N);
    let up = UpsilonPoint::embed(&pt);
    assert_eq!(up.level(), 3);
    let back = up.restrict().unwrap();
    assert_eq!(back.x, pt.x);
    assert_eq!(back.v, pt.v);
    assert_eq!(back.t, pt.t);
    let flat = up.flatten();
    assert_eq!(flat.len(), 2 * 8 + 7);
    let generic = fixtures::upsilon_point(&mut rng, f, 2, 3, N);
    assert!(generic.restrict().is_none());
}

#[test]
fn slice_property() {
    let mut rng = fixtures::rng(16);
    for p in [2, 3, 5] {
        let f = qp(p);
        for i in 0..100 {
            let n = 1 + i % 3;
            let g = fixtures::scalar_poly_fn(&mut rng, f, 1, 4, N);
            let pt = fixtures::phi_point(&mut rng, f, 1, n, N);
            assert_eq!(upsilon_eval(&g, &UpsilonPoint::embed(&pt)).unwrap(), phi_eval(&g, &pt).unwrap(), "p={p} n={n}");
        }
    }
}

#[test]
fn phi_bar_is_symmetric_at_zero() {
    let mut rng = fixtures::rng(17);
    let f = qp(5);
    for _ in 0..20 {
        let g = fixtures::scalar_poly_fn(&mut rng, f, 2, 4, N);
        let pt = fixtures::phi_point(&mut rng, f, 2, 3, N);
        let zeros = vec![Lfe::zero(f); 3];
        let a = phi_eval(&g, &PhiPoint::new(pt.x.clone(), pt.v.clone(), zeros.clone()).unwrap()).unwrap();
        let perm = vec![pt.v[2].clone(), pt.v[0].clone(), pt.v[1].clone()];
        let b = phi_eval(&g, &PhiPoint::new(pt.x.clone(), perm, zeros).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn cnb_examples() {
    let f = qp(3);
    let units: Vec<Vec<Lfe>> = (0..9).map(|i| vec![int(f, i)]).collect();
    let sampler = |flavor| Sampler {
        points: units.clone(),
        directions: vec![vec![int(f, 1)], vec![int(f, 2)]],
        scalars: vec![int(f, 1), int(f, 3), Lfe::zero(f)],
        flavor,
        limit: 1000,
    };
    let zero = FnRepr::scalar_poly(f, MPoly::zero(1));
    assert!(cnb_norm(&zero, 2, &sampler(Flavor::Phi)).unwrap().is_zero());
    let id = FnRepr::identity(f, Domain::unit_ball(f, 1, N), N);
    assert_eq!(cnb_norm(&id, 1, &sampler(Flavor::Phi)).unwrap(), Norm::one(3));
    assert_eq!(cnb_norm(&id, 1, &sampler(Flavor::Upsilon)).unwrap(), Norm::one(3));
    let px = FnRepr::scalar_poly(f, upoly(f, &[0, 3]));
    assert_eq!(cnb_norm(&px, 0, &sampler(Flavor::Phi)).unwrap(), Norm::from_valuation(3, 1));

    let empty = Sampler { points: vec![], directions: vec![], scalars: vec![], flavor: Flavor::Phi, limit: 10 };
    assert!(matches!(cnb_norm(&id, 1, &empty), Err(Error::EmptySampler)));
}

#[test]
fn cnb_is_monotone_in_sample_size() {
    let mut rng = fixtures::rng(18);
    let f = qp(2);
    let g = fixtures::scalar_poly_fn(&mut rng, f, 1, 4, N);
    let mut prev = Norm::zero(2);
    for size in 1..6 {
        let sampler = Sampler {
            points: (0..size).map(|i| vec![int(f, i)]).collect(),
            directions: vec![vec![int(f, 1)]],
            scalars: (1..=size).map(|i| int(f, 2 * i - 1)).collect(),
            flavor: Flavor::Phi,
            limit: 10_000,
        };
        let n = cnb_norm(&g, 2, &sampler).unwrap();
        assert!(n >= prev);
        prev = n;
    }
}

#[test]
fn differential_examples() {
    let f = qp(5);
    let sq = FnRepr::scalar_poly(f, upoly(f, &[0, 0, 1]));
    for (x, v) in [(1, 1), (3, 2), (-4, 7)] {
        assert_eq!(differential_eval(&sq, &[int(f, x)], &[vec![int(f, v)]]).unwrap()[0], int(f, 2 * x * v));
    }
    let c = FnRepr::scalar_poly(f, upoly(f, &[9]));
    assert!(differential_eval(&c, &[int(f, 2)], &[vec![int(f, 1)]]).unwrap()[0].is_zero());

    let cube = FnRepr::scalar_poly(f, upoly(f, &[0, 0, 0, 1]));
    let one = vec![int(f, 1)];
    let zeros = vec![Lfe::zero(f); 2];
    let phi_bar = phi_eval(&cube, &PhiPoint::new(one.clone(), vec![one.clone(), one.clone()], zeros).unwrap()).unwrap();
    assert_eq!(phi_bar[0], int(f, 6));
    assert_eq!(differential_eval(&cube, &one, &[one.clone(), one.clone()]).unwrap()[0], int(f, 12));
}

#[test]
fn differential_is_multilinear_and_symmetric() {
    let mut rng = fixtures::rng(19);
    let f = qp(7);
    for _ in 0..10 {
        let g = fixtures::scalar_poly_fn(&mut rng, f, 2, 4, N);
        let x: Vec<Lfe> = (0..2).map(|_| fixtures::integer(&mut rng, f, N)).collect();
        let v: Vec<Vec<Lfe>> = (0..3).map(|_| (0..2).map(|_| fixtures::integer(&mut rng, f, N)).collect()).collect();
        let a = fixtures::integer(&mut rng, f, N);
        let d = |dirs: &[Vec<Lfe>]| differential_eval(&g, &x, dirs).unwrap().swap_remove(0);
        let sum: Vec<Lfe> = v[0].iter().zip(&v[2]).map(|(s, t)| &(&a * s) + t).collect();
        assert_eq!(d(&[sum, v[1].clone()]), &(&a * &d(&[v[0].clone(), v[1].clone()])) + &d(&[v[2].clone(), v[1].clone()]));
        assert_eq!(d(&[v[0].clone(), v[1].clone()]), d(&[v[1].clone(), v[0].clone()]));
    }
}

#[test]
fn differential_characteristic_obstruction() {
    let f = FieldDescriptor::laurent(2, 1).unwrap();
    let one = Lfe::one(f, N);
    let g = FnRepr::scalar_poly(f, MPoly::from_terms(1, vec![(vec![3], one.clone())]));
    let dirs = vec![vec![one.clone()], vec![one.clone()]];
    assert!(matches!(differential_eval(&g, &[one.clone()], &dirs), Err(Error::CharacteristicObstruction { p: 2, n: 2 })));
    assert!(differential_eval(&g, &[one.clone()], &dirs[..1]).is_ok());
}

#[test]
fn leibniz_first_order_identity() {
    let f = qp(3);
    let id = FnRepr::scalar_poly(f, upoly(f, &[0, 1]));
    let (x, v, t) = (int(f, 4), int(f, 5), int(f, 2));
    let pt = PhiPoint::new(vec![x.clone()], vec![vec![v.clone()]], vec![t.clone()]).unwrap();
    for cp in [CheckPoint::Phi(pt.clone()), CheckPoint::Upsilon(UpsilonPoint::embed(&pt))] {
        let r = leibniz_check(&id, &id, &cp).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.lhs, vec![(&v * &(&(&x + &x) + &(&v * &t))).to_string()]);
        assert_eq!(r.margin, 0);
    }
}

#[test]
fn leibniz_second_order_against_rational_oracle() {
    let mut rng = fixtures::rng(20);
    let f = qp(3);
    let x1 = FnRepr::scalar_poly(f, upoly(f, &[0, 1]));
    let x2 = FnRepr::scalar_poly(f, upoly(f, &[0, 0, 1]));
    let cube = rpoly(&[0, 0, 0, 1]);
    for _ in 0..50 {
        let rp = random_rpoint(&mut rng, 3, 1, 2);
        let expected = rat_to_lfe(f, &upsilon_rational(&cube, &rp));
        let r = leibniz_check(&x1, &x2, &CheckPoint::Upsilon(rp.to_lfe(f))).unwrap();
        assert!(r.pass);
        assert_eq!(upsilon_eval(&x1.product(&x2), &rp.to_lfe(f)).unwrap()[0], expected);
        let pt = fixtures::phi_point(&mut rng, f, 1, 2, N);
        assert!(leibniz_check(&x1, &x2, &CheckPoint::Phi(pt)).unwrap().pass);
    }
}

#[test]
fn leibniz_third_order_has_the_eight_published_terms() {
    let words: BTreeSet<String> =
        ["(ΥΥΥf)(P̂P̂P̂g)", "(π̂ΥΥf)(ΥP̂P̂g)", "(Υπ̂Υf)(P̂ΥP̂g)", "(π̂π̂Υf)(ΥΥP̂g)", "(ΥΥπ̂f)(P̂P̂Υg)", "(π̂Υπ̂f)(ΥP̂Υg)", "(Υπ̂π̂f)(P̂ΥΥg)", "(π̂π̂π̂f)(ΥΥΥg)"]
            .into_iter()
            .map(String::from)
            .collect();
    let expr = Expr::Prod(vec![Expr::leaf(0), Expr::leaf(1)]).upsilon_n(3);
    let names = vec!["f".to_string(), "g".to_string()];
    let summands = expr.summands();
    assert_eq!(summands.len(), 8);
    assert!(summands.iter().all(|(c, _)| *c == 1));
    let rendered: BTreeSet<String> = summands.iter().map(|(_, e)| e.display(&names).to_string()).collect();
    assert_eq!(rendered, words);
    assert_eq!(expr.level(), Some(3));

    let mut rng = fixtures::rng(21);
    let f = qp(2);
    let g1 = fixtures::scalar_poly_fn(&mut rng, f, 1, 4, N);
    let g2 = fixtures::scalar_poly_fn(&mut rng, f, 1, 4, N);
    for _ in 0..10 {
        let pt = fixtures::upsilon_point(&mut rng, f, 1, 3, N);
        assert!(leibniz_check(&g1, &g2, &CheckPoint::Upsilon(pt)).unwrap().pass);
    }
}

#[test]
fn leibniz_vector_valued_second_factor() {
    let mut rng = fixtures::rng(22);
    let f = qp(5);
    let a = fixtures::scalar_poly_fn(&mut rng, f, 2, 3, N);
    let polys = (0..3).map(|_| fixtures::polynomial(&mut rng, f, 2, 3, N)).collect();
    let b = FnRepr::polynomial(f, Domain::whole(2), polys);
    let pt = fixtures::phi_point(&mut rng, f, 2, 2, N);
    let r = leibniz_check(&a, &b, &CheckPoint::Phi(pt.clone())).unwrap();
    assert!(r.pass);
    assert_eq!(r.lhs.len(), 3);
    assert!(leibniz_check(&a, &b, &CheckPoint::Upsilon(UpsilonPoint::embed(&pt))).unwrap().pass);
    assert!(matches!(leibniz_check(&b, &a, &CheckPoint::Phi(pt)), Err(Error::ShapeMismatch(_))));
}

#[test]
fn leibniz_mismatch_reports_terms() {
    let f = qp(3);
    let good = FnRepr::scalar_poly(f, upoly(f, &[1, 1]));
    let pt = PhiPoint::new(vec![int(f, 0)], vec![vec![int(f, 1)]], vec![int(f, 1)]).unwrap();
    let bad_env = [good.clone(), good.clone()];
    let expr = Expr::Prod(vec![Expr::leaf(0), Expr::leaf(1)]).upsilon();
    let v = expr.eval(&bad_env, &UpsilonPoint::embed(&pt)).unwrap();
    assert_eq!(v, int(f, 3));
    let failing = CheckReport {
        identity: "leibniz".into(),
        flavor: Flavor::Phi,
        n: 1,
        lhs: vec!["1".into()],
        rhs: vec!["2".into()],
        margin: 0,
        pass: false,
        terms: vec![("(Υf1)(P̂f2)".into(), "2".into())],
    };
    match failing.ensure() {
        Err(Error::Mismatch(msg)) => assert!(msg.contains("(Υf1)(P̂f2) = 2")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn leibniz_multi_examples() {
    let mut rng = fixtures::rng(23);
    let f = qp(2);
    let id = FnRepr::scalar_poly(f, upoly(f, &[0, 1]));
    let cube = rpoly(&[0, 0, 0, 1]);
    for _ in 0..20 {
        let rp = random_rpoint(&mut rng, 2, 1, 1);
        let r = leibniz_multi_check(&[id.clone(), id.clone(), id.clone()], &CheckPoint::Upsilon(rp.to_lfe(f))).unwrap();
        assert!(r.pass);
        let prod = id.product(&id).product(&id);
        assert_eq!(upsilon_eval(&prod, &rp.to_lfe(f)).unwrap()[0], rat_to_lfe(f, &upsilon_rational(&cube, &rp)));
    }

    let g1 = fixtures::scalar_poly_fn(&mut rng, f, 1, 3, N);
    let g2 = fixtures::scalar_poly_fn(&mut rng, f, 1, 3, N);
    let one = FnRepr::scalar_poly(f, upoly(f, &[1]));
    for n in 1..=3 {
        let pt = fixtures::phi_point(&mut rng, f, 1, n, N);
        for cp in [CheckPoint::Phi(pt.clone()), CheckPoint::Upsilon(UpsilonPoint::embed(&pt))] {
            let two = leibniz_check(&g1, &g2, &cp).unwrap();
            let multi = leibniz_multi_check(&[g1.clone(), g2.clone()], &cp).unwrap();
            assert!(two.pass && multi.pass);
            assert_eq!(two.lhs, multi.lhs);
            assert_eq!(two.rhs, multi.rhs);
            let padded = leibniz_multi_check(&[one.clone(), g1.clone(), g2.clone()], &cp).unwrap();
            assert!(padded.pass);
            assert_eq!(padded.lhs, two.lhs);
        }
    }
    assert!(leibniz_multi_check(&[], &CheckPoint::Phi(fixtures::phi_point(&mut rng, f, 1, 1, N))).is_err());
}

#[test]
fn chain_first_order_two_coordinates() {
    let mut rng = fixtures::rng(24);
    let f = qp(3);
    let outer = FnRepr::scalar_poly(f, fixtures::polynomial(&mut rng, f, 2, 3, N));
    let inner = FnRepr::polynomial(f, Domain::whole(1), vec![upoly(f, &[1, 2, 1]), upoly(f, &[0, -1, 0, 1])]);
    let expr = Expr::Compose { poly: outer.as_polynomials().unwrap()[0].clone(), args: vec![Expr::leaf(0), Expr::leaf(1)] }.upsilon();
    assert_eq!(expr.summands().len(), 2);
    for _ in 0..10 {
        let pt = fixtures::upsilon_point(&mut rng, f, 1, 1, N);
        let r = chain_check(&outer, &inner, &CheckPoint::Upsilon(pt)).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn chain_with_identity_outer_map() {
    let mut rng = fixtures::rng(25);
    let f = qp(5);
    let polys: Vec<MPoly<Lfe>> = (0..2).map(|_| fixtures::polynomial(&mut rng, f, 1, 3, N)).collect();
    let u = FnRepr::polynomial(f, Domain::whole(1), polys);
    let id = FnRepr::identity(f, Domain::whole(2), N);
    for n in 1..=3 {
        let pt = fixtures::upsilon_point(&mut rng, f, 1, n, N);
        let r = chain_check(&id, &u, &CheckPoint::Upsilon(pt.clone())).unwrap();
        assert!(r.pass);
        let direct: Vec<String> = upsilon_eval(&u, &pt).unwrap().iter().map(|c| c.to_string()).collect();
        assert_eq!(r.rhs, direct);
    }
}

#[test]
fn chain_product_of_coordinates() {
    let mut rng = fixtures::rng(26);
    let f = qp(3);
    let outer = FnRepr::scalar_poly(f, monomial(f, 2, &[1, 1], 1));
    let inner = FnRepr::polynomial(f, Domain::whole(1), vec![upoly(f, &[0, 1]), upoly(f, &[0, 0, 1])]);
    let cube = rpoly(&[0, 0, 0, 1]);
    for _ in 0..20 {
        let rp = random_rpoint(&mut rng, 3, 1, 2);
        let r = chain_check(&outer, &inner, &CheckPoint::Upsilon(rp.to_lfe(f))).unwrap();
        assert!(r.pass);
        let composite = outer.compose(&inner);
        assert_eq!(upsilon_eval(&composite, &rp.to_lfe(f)).unwrap()[0], rat_to_lfe(f, &upsilon_rational(&cube, &rp)));
        let pt = fixtures::phi_point(&mut rng, f, 1, 2, N);
        assert!(chain_check(&outer, &inner, &CheckPoint::Phi(pt)).unwrap().pass);
    }
    let pt = fixtures::upsilon_point(&mut rng, f, 1, 3, N);
    assert!(chain_check(&outer, &inner, &CheckPoint::Upsilon(pt)).unwrap().pass);
}

#[test]
fn chain_rejects_bad_shapes() {
    let f = qp(3);
    let outer = FnRepr::scalar_poly(f, monomial(f, 2, &[1, 1], 1));
    let inner = FnRepr::scalar_poly(f, upoly(f, &[0, 1]));
    let pt = PhiPoint::new(vec![int(f, 1)], vec![vec![int(f, 1)]], vec![int(f, 1)]).unwrap();
    assert!(matches!(chain_check(&outer, &inner, &CheckPoint::Phi(pt.clone())), Err(Error::ShapeMismatch(_))));
    let opaque = FnRepr::opaque(f, Domain::whole(1), 1, Smoothness::C(1), Arc::new(|x| Ok(x.to_vec())));
    assert!(matches!(chain_check(&opaque, &inner, &CheckPoint::Phi(pt)), Err(Error::InvalidArgument(_))));
}

#[test]
fn divided_difference_of_square() {
    let f = qp(3);
    let sq = upoly(f, &[0, 0, 1]);
    let d = divided_difference(&sq, 0);
    let z = [int(f, 4), int(f, 5)];
    assert_eq!(d.eval(&z, &z[0]), int(f, 13));
}

#[test]
fn eval_word_rejects_level_mismatch() {
    let f = qp(3);
    let g = FnRepr::scalar_poly(f, upoly(f, &[0, 1]));
    assert!(eval_word(&g, &[Op::Upsilon], &UpsilonPoint::Base(vec![int(f, 1)])).is_err());
    assert_eq!(eval_word(&g, &[], &UpsilonPoint::Base(vec![int(f, 1)])).unwrap(), int(f, 1));
}

fn arb_coeffs() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-50i64..50, 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn upsilon_is_linear(a in arb_coeffs(), b in arb_coeffs(), s in -20i64..20, r in -20i64..20, seed in any::<u64>()) {
        let f = qp(3);
        let (fa, fb) = (FnRepr::scalar_poly(f, upoly(f, &a)), FnRepr::scalar_poly(f, upoly(f, &b)));
        let (s, r) = (int(f, s), int(f, r));
        let comb = fa.linear_combination(&s, &fb, &r);
        let mut rng = fixtures::rng(seed);
        let pt = fixtures::upsilon_point(&mut rng, f, 1, 2, N);
        let lhs = upsilon_eval(&comb, &pt).unwrap();
        let rhs = &(&s * &upsilon_eval(&fa, &pt).unwrap()[0]) + &(&r * &upsilon_eval(&fb, &pt).unwrap()[0]);
        prop_assert_eq!(&lhs[0], &rhs);
        let ppt = fixtures::phi_point(&mut rng, f, 1, 2, N);
        let lhs = phi_eval(&comb, &ppt).unwrap();
        let rhs = &(&s * &phi_eval(&fa, &ppt).unwrap()[0]) + &(&r * &phi_eval(&fb, &ppt).unwrap()[0]);
        prop_assert_eq!(&lhs[0], &rhs);
    }

    #[test]
    fn product_and_chain_rules_hold_with_zero_margin(seed in any::<u64>(), n in 1usize..=3) {
        let f = qp(5);
        let mut rng = fixtures::rng(seed);
        let g1 = fixtures::scalar_poly_fn(&mut rng, f, 1, 3, N);
        let g2 = fixtures::scalar_poly_fn(&mut rng, f, 1, 3, N);
        let pt = fixtures::phi_point(&mut rng, f, 1, n, N);
        let r = leibniz_check(&g1, &g2, &CheckPoint::Phi(pt.clone())).unwrap();
        prop_assert!(r.pass);
        prop_assert_eq!(r.margin, 0);
        let outer = FnRepr::scalar_poly(f, fixtures::polynomial(&mut rng, f, 2, 2, N));
        let inner = FnRepr::polynomial(f, Domain::whole(1), vec![fixtures::polynomial(&mut rng, f, 1, 2, N), fixtures::polynomial(&mut rng, f, 1, 2, N)]);
        let r = chain_check(&outer, &inner, &CheckPoint::Phi(pt)).unwrap();
        prop_assert!(r.pass);
        prop_assert_eq!(r.margin, 0);
    }

    #[test]
    fn rational_oracle_agrees_for_random_polynomials(c in arb_coeffs(), seed in any::<u64>(), n in 1usize..=3) {
        let f = qp(7);
        let mut rng = fixtures::rng(seed);
        let rp = random_rpoint(&mut rng, 7, 1, n);
        let g = FnRepr::scalar_poly(f, upoly(f, &c));
        let expected = rat_to_lfe(f, &upsilon_rational(&rpoly(&c), &rp));
        prop_assert_eq!(&upsilon_eval(&g, &rp.to_lfe(f)).unwrap()[0], &expected);
    }
}

#[test]
fn rational_helpers_are_consistent() {
    assert_eq!(rpoly(&[1, 2, 3])(&[rat(2)]), rat(17));
    assert!(BigRational::one() == rat(1));
}
