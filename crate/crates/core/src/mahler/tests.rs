use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use super::combinatorics::{binomial, factorial, t_direct, two_index_identity};
use super::*;
use crate::calculus::{Domain, FnRepr, Smoothness};
use crate::error::Error;
use crate::fixtures;
use crate::ultrametric::{FieldDescriptor, Lfe, Norm};

const N: i64 = 24;

fn qp(p: u32) -> FieldDescriptor {
    FieldDescriptor::padic(p).unwrap()
}

fn int(f: FieldDescriptor, n: i64) -> Lfe {
    Lfe::from_int(f, n, N)
}

fn series(f: FieldDescriptor, c: &[i64]) -> MahlerSeries {
    MahlerSeries::from_ints(f, c, N).unwrap()
}

fn poly_at(c: &[i64], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, &a| acc * x + a)
}

/// `Σ_i (−1)^{j−i} C(j, i) f(i)` over ℤ.
fn mahler_oracle(c: &[i64], j: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..=j {
        let term = binomial(j as i64, i as i64) * poly_at(c, &BigInt::from(i));
        if (j - i) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn near_identity(rng: &mut fixtures::FixtureRng, f: FieldDescriptor, len: usize) -> MahlerSeries {
    use rand::Rng;
    let p = f.p as i64;
    let mut c = vec![0, 1 + p * rng.gen_range(-2..=2)];
    c.extend((2..len).map(|_| p * rng.gen_range(-3..=3)));
    series(f, &c)
}

#[test]
fn expand_examples() {
    for p in [2, 3, 5] {
        let f = qp(p);
        let id = expand_poly_ints(f, &[0, 1], 6, N).unwrap();
        assert_eq!(id.to_string(), "[0,1,0,0,0,0,0]");
        assert_eq!(id.tail, Tail::Exact);
        let sq = expand_poly_ints(f, &[0, 0, 1], 6, N).unwrap();
        assert_eq!(sq.to_string(), "[0,1,2,0,0,0,0]");
    }
}

#[test]
fn difference_lowers_basis_index() {
    let f = qp(3);
    for j in 1..8 {
        let mut c = vec![0i64; j + 1];
        c[j] = 1;
        let e = series(f, &c);
        let mut c1 = vec![0i64; j];
        c1[j - 1] = 1;
        let e1 = series(f, &c1);
        for x in [0i64, 1, 4, 17, -5] {
            let d = &evaluate(&e, &int(f, x + 1)).unwrap() - &evaluate(&e, &int(f, x)).unwrap();
            assert_eq!(d, evaluate(&e1, &int(f, x)).unwrap());
        }
    }
}

#[test]
fn expand_matches_alternating_sum_oracle() {
    let f = qp(5);
    let c = [4, -3, 0, 7, 2, -1];
    let s = expand_poly_ints(f, &c, 9, N).unwrap();
    for j in 0..=9 {
        assert_eq!(s.coeff(j), Lfe::from_bigint(f, &mahler_oracle(&c, j), N), "j={j}");
    }
}

#[test]
fn evaluate_examples() {
    let f = qp(3);
    assert_eq!(evaluate(&series(f, &[0, 1]), &int(f, 7)).unwrap(), int(f, 7));
    let f2 = qp(2);
    let sq = expand_poly_ints(f2, &[0, 0, 1], 4, 8).unwrap();
    let v = evaluate(&sq, &Lfe::from_int(f2, 3, 8)).unwrap();
    assert!(v.eq_mod(&Lfe::from_int(f2, 9, 8), 6));
    assert_eq!(v.to_bigint_balanced().map(|b| b % 64), Some(BigInt::from(9)));
    for p in [2, 3, 7] {
        let f = qp(p);
        let pows: Vec<Lfe> = (0..8).map(|j| Lfe::one(f, N).shift(j)).collect();
        let s = MahlerSeries::new(f, pows).unwrap();
        assert_eq!(evaluate(&s, &int(f, 1)).unwrap(), int(f, 1 + p as i64));
    }
}

#[test]
fn evaluate_respects_tail_information() {
    let f = qp(3);
    let s = series(f, &[1, 2, 1]).with_tail(Tail::Bounded(5));
    assert_eq!(evaluate(&s, &int(f, 2)).unwrap().precision(), Some(5));
    let bad = series(f, &[0, 1, 1, 1, 1]).with_tail(Tail::Unknown);
    assert!(!bad.decay_flag(1.0));
    assert!(matches!(evaluate(&bad, &int(f, 2)), Err(Error::DivergentTail(_))));
    assert!(matches!(compose(&bad, &bad, 3), Err(Error::DivergentTail(_))));
    let good = series(f, &[0, 1, 3, 9, 27]).with_tail(Tail::Unknown);
    assert!(good.decay_flag(1.0));
    assert!(evaluate(&good, &int(f, 2)).is_ok());
    let half = Lfe::from_rational(f, &1.into(), &3.into(), N).unwrap();
    assert!(matches!(evaluate(&good, &half), Err(Error::DomainViolation(_))));
}

#[test]
fn decay_proxy_uses_claimed_class() {
    let f = qp(2);
    let c: Vec<Lfe> = (0..16).map(|j| Lfe::one(f, N).shift(j)).collect();
    let mut s = MahlerSeries::new(f, c).unwrap().with_tail(Tail::Unknown);
    assert!(s.decay_flag(1e-2));
    s.class_t = Some(3);
    assert!(!s.decay_flag(1e-2));
    assert!(s.decay_flag(1.0));
    let flat = series(f, &[1; 16]).with_tail(Tail::Unknown);
    assert!(!flat.decay_flag(1e-2));
}

#[test]
fn compose_examples() {
    for p in [2, 3] {
        let f = qp(p);
        let id = MahlerSeries::identity(f, N);
        let c = compose(&id, &id, 6).unwrap();
        assert_eq!(identity_agreement(&c, 7), c.precision().min(identity_agreement(&c, 7)));
        assert_eq!(c.to_string(), "[0,1,0,0,0,0,0]");
        let sq = expand_poly_ints(f, &[0, 0, 1], 6, N).unwrap();
        let shift = expand_poly_ints(f, &[1, 1], 6, N).unwrap();
        let lhs = compose(&sq, &shift, 6).unwrap();
        let rhs = expand_poly_ints(f, &[1, 2, 1], 6, N).unwrap();
        assert_eq!(lhs.coeffs(), rhs.coeffs());
    }
}

#[test]
fn omega_route_matches_numeric_composition() {
    let mut rng = fixtures::rng(31);
    for p in [2, 3] {
        let f = qp(p);
        for _ in 0..4 {
            let g = series(f, &[3, -1, 2 * p as i64, 5]);
            let inner = near_identity(&mut rng, f, 5);
            let a = compose(&g, &inner, 4).unwrap();
            let b = compose_omega(&g, &inner, 4).unwrap();
            assert_eq!(a.coeffs(), b.coeffs(), "p={p}");
        }
        let g = series(f, &[1, 1, 1, 1]);
        let inner = series(f, &[2, 3, 1]);
        assert_eq!(compose(&g, &inner, 4).unwrap().coeffs(), compose_omega(&g, &inner, 4).unwrap().coeffs());
    }
}

#[test]
fn q_matrix_matches_omega_route() {
    let mut rng = fixtures::rng(32);
    for p in [2, 3, 5] {
        let f = qp(p);
        let s = near_identity(&mut rng, f, 4);
        let m = q_matrix(&s, 3).unwrap();
        for k in 0..=3 {
            for n in 0..=3 {
                let nf = Lfe::from_bigint(f, &factorial(n as u64), N);
                assert_eq!(&m[k][n] * &nf, q_omega(&s, k, n).unwrap());
                assert_eq!(q_numeric(&s, k, n).unwrap(), q_omega(&s, k, n).unwrap());
            }
        }
    }
}

#[test]
fn stirling_examples() {
    let t = stirling_tables(8).unwrap();
    assert_eq!(t.s[2][1], q(-1, 2));
    assert_eq!(t.s[2][2], q(1, 2));
    assert_eq!(t.t[1][1], BigInt::one());
    let st = |m: usize, j: usize| -> BigRational { (0..=8).map(|l| &t.s[m][l] * BigRational::from_integer(t.t[l][j].clone())).sum() };
    assert_eq!(st(2, 2), BigRational::one());
    assert_eq!(st(2, 1), BigRational::zero());
    assert!(stirling_tables(65).is_err());
}

#[test]
fn stirling_tables_invert_exactly_at_full_size() {
    let t = stirling_tables(64).unwrap();
    assert_eq!(t.verify_inverse(), Ok(()));
}

#[test]
fn t_is_the_difference_bridge() {
    let f = qp(7);
    for n in 0..=8usize {
        let mut c = vec![0i64; n + 1];
        c[n] = 1;
        let s = expand_poly_ints(f, &c, 10, N).unwrap();
        for k in 0..=10 {
            assert_eq!(s.coeff(k), Lfe::from_bigint(f, &t_direct(n, k), N));
        }
    }
}

#[test]
fn tables_export_as_csv() {
    let t = stirling_tables(3).unwrap();
    let csv = t.to_csv('S');
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().nth(3).unwrap().starts_with("2,0,-1/2,1/2,0"));
    assert!(t.to_csv('T').lines().nth(4).unwrap().starts_with("3,0,1,6,6"));
}

#[test]
fn omega_matches_published_two_index_identity() {
    for k in 0..=6 {
        for m1 in 0..=6 {
            for m2 in 0..=6 {
                let (l, r) = two_index_identity(k, m1, m2);
                assert_eq!(l, r, "k={k} m1={m1} m2={m2}");
            }
        }
    }
    assert_eq!(omega(3, &[3]).unwrap(), BigInt::one());
    assert_eq!(omega(3, &[2]).unwrap(), BigInt::zero());
    for k in 0..=4 {
        for m1 in 0..=k {
            for m2 in 0..=k {
                assert_eq!(omega(k, &[m1, m2]).unwrap(), omega_from_generating(k, &[m1, m2]));
                for m3 in 0..=k {
                    assert_eq!(omega(k, &[m1, m2, m3]).unwrap(), omega_from_generating(k, &[m1, m2, m3]));
                }
            }
        }
    }
}

#[test]
fn invert_examples() {
    let f = qp(3);
    let id = MahlerSeries::identity(f, N);
    let inv = invert(&id, 6).unwrap();
    assert!(identity_agreement(&inv, 7) >= N - 2);

    let g = series(f, &[0, 1, 3]);
    let h = invert(&g, 6).unwrap();
    let round = compose(&h, &g, 6).unwrap();
    assert!(identity_agreement(&round, 7) >= 4, "{round}");

    assert!(matches!(invert(&series(f, &[1, 1]), 4), Err(Error::SingularSystem(_))));
    assert!(matches!(invert(&series(f, &[0, 2]), 4), Err(Error::SingularSystem(_))));
    assert!(matches!(invert(&series(f, &[0, 1, 1]), 4), Err(Error::SingularSystem(_))));

    let f2 = qp(2);
    let folded = series(f2, &[0, 1, -2, -2]);
    assert!(check_admissible(&folded).is_ok());
    assert_eq!(evaluate(&folded, &int(f2, 2)).unwrap(), evaluate(&folded, &int(f2, 0)).unwrap());
    assert!(matches!(invert(&folded, 7), Err(Error::SingularSystem(_))));
}

#[test]
fn invert_round_trip_for_random_near_identity_series() {
    use rand::Rng;
    let mut rng = fixtures::rng(33);
    for p in [2, 3, 5] {
        let f = qp(p);
        for _ in 0..5 {
            let mut c = vec![0, 1 + p as i64 * rng.gen_range(-2..=2)];
            for j in 2..5u32 {
                let lip = (p as i64).pow(1 + j.ilog(p));
                c.push(lip * rng.gen_range(-3..=3));
            }
            let g = series(f, &c);
            let h = invert(&g, 7).unwrap();
            let round = compose(&h, &g, 7).unwrap();
            assert!(identity_agreement(&round, 8) >= 4, "p={p} g={g} h={h}");
        }
    }
}

#[test]
fn analytic_compose_examples() {
    let g = ints(&[0, 0, 1]);
    let f = ints(&[1, 1]);
    assert_eq!(analytic_compose(&g, &f, 4), ints(&[1, 2, 1]));
    assert_eq!(horner_compose(&g, &f, 4), ints(&[1, 2, 1]));
}

#[test]
fn base_change_round_trip() {
    let f = qp(3);
    for n in 0..=10 {
        let mono = unit_monomial(n);
        let tables = stirling_tables(n).unwrap();
        let mahler: Vec<BigRational> = (0..=n).map(|k| BigRational::from_integer(tables.t[n][k].clone())).collect();
        assert_eq!(mahler_to_monomial(&mahler).unwrap(), mono);
        let s = monomial_to_mahler(f, &mono, N).unwrap();
        for (k, c) in s.coeffs().iter().enumerate() {
            assert_eq!(c, &Lfe::from_bigint(f, &tables.t[n][k], N));
        }
    }
}

#[test]
fn analytic_composition_agrees_with_mahler_composition() {
    let f = qp(5);
    let g = [2i64, -1, 3];
    let h = [0i64, 1, 5];
    let composed = analytic_compose(&ints(&g), &ints(&h), 8);
    let via_mahler = monomial_to_mahler(f, &composed, N).unwrap();
    let gs = expand_poly_ints(f, &g, 4, N).unwrap();
    let hs = expand_poly_ints(f, &h, 4, N).unwrap();
    let direct = compose(&gs, &hs, composed.len() - 1).unwrap();
    assert_eq!(via_mahler.coeffs(), direct.coeffs());
}

#[test]
fn mahler_backed_functions_evaluate_like_their_polynomials() {
    let f = qp(3);
    let s = expand_poly_ints(f, &[1, -2, 0, 1], 5, N).unwrap();
    let poly = s.to_polynomial().unwrap();
    let g = FnRepr::mahler(f, vec![s.clone()]);
    for x in [0i64, 1, 2, 10, -4] {
        let y = g.eval_scalar(&[int(f, x)]).unwrap();
        assert_eq!(y, poly.eval(&[int(f, x)], &int(f, 0)));
        assert_eq!(y, int(f, 1 - 2 * x + x * x * x));
    }
}

#[test]
fn expand_of_opaque_function_has_unknown_tail() {
    let f = qp(2);
    let g = FnRepr::opaque(f, Domain::unit_ball(f, 1, N), 1, Smoothness::C(1), std::sync::Arc::new(|x| Ok(vec![&x[0] * &x[0]])));
    let s = expand(&g, 6, N).unwrap();
    assert_eq!(s.tail, Tail::Unknown);
    assert_eq!(s.to_string(), "[0,1,2,0,0,0,0]");
}

#[test]
fn parse_and_display() {
    let s = MahlerSeries::parse("p=3 N=16 coeffs=[0, 1, 1/2, -3]").unwrap();
    assert_eq!(s.field(), qp(3));
    assert_eq!(s.precision(), 16);
    assert_eq!(s.coeff(2), Lfe::from_rational(qp(3), &1.into(), &2.into(), 16).unwrap());
    let shown = s.to_string();
    assert!(shown.starts_with("[0,1,") && shown.ends_with(",-3]"));
    assert_eq!(MahlerSeries::parse(&format!("p=3 N=16 coeffs={shown}")).unwrap().coeffs(), s.coeffs());
    assert!(matches!(MahlerSeries::parse("p=3 N=16 coeffs=[1,2"), Err(Error::Parse { .. })));
    assert!(matches!(MahlerSeries::parse("p=3 q=1 coeffs=[1]"), Err(Error::Parse { .. })));
    assert!(MahlerSeries::parse("p=4 coeffs=[1]").is_err());
    assert!(MahlerSeries::new(FieldDescriptor::laurent(3, 1).unwrap(), vec![]).is_err());
}

#[test]
fn binomials_lose_only_log_digits() {
    let f = qp(2);
    let x = Lfe::from_int(f, 13, 10);
    let b = binom_padic(&x, 4).unwrap();
    assert_eq!(b.precision(), Some(8));
    assert_eq!(b, Lfe::from_int(f, 715, 8));
    assert!(matches!(binom_padic(&Lfe::from_int(f, 1, 3), 8), Err(Error::PrecisionExhausted(_))));
}

fn arb_poly() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-40i64..40, 1..=9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expand_evaluate_round_trip(c in arb_poly(), p in prop::sample::select(vec![2u32, 3, 5]), seed in any::<u64>()) {
        let f = qp(p);
        let j = 8;
        let s = expand_poly_ints(f, &c, j, N).unwrap();
        for x in 0..=(2 * j as i64) {
            let expected = Lfe::from_bigint(f, &poly_at(&c, &BigInt::from(x)), N);
            prop_assert_eq!(evaluate(&s, &int(f, x)).unwrap(), expected);
        }
        let mut rng = fixtures::rng(seed);
        let x = fixtures::integer(&mut rng, f, N);
        let direct = c.iter().rev().fold(Lfe::zero(f), |acc, &a| &(&acc * &x) + &int(f, a));
        prop_assert_eq!(evaluate(&s, &x).unwrap(), direct);
    }

    #[test]
    fn coefficients_bounded_by_sup_norm(c in arb_poly(), p in prop::sample::select(vec![2u32, 3, 7])) {
        let f = qp(p);
        let s = expand_poly_ints(f, &c, 8, N).unwrap();
        let sup = (0..=8).map(|x| int(f, 0) + Lfe::from_bigint(f, &poly_at(&c, &BigInt::from(x)), N))
            .fold(Norm::zero(p), |acc, v| acc.max(v.norm()));
        for fj in s.coeffs() {
            prop_assert!(fj.norm() <= sup);
        }
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3])) {
        let f = qp(p);
        let mut rng = fixtures::rng(seed);
        let (a, b, c) = (near_identity(&mut rng, f, 3), near_identity(&mut rng, f, 3), near_identity(&mut rng, f, 3));
        let k = 8;
        let left = compose(&compose(&a, &b, k).unwrap(), &c, k).unwrap();
        let right = compose(&a, &compose(&b, &c, k).unwrap(), k).unwrap();
        prop_assert_eq!(left.coeffs(), right.coeffs());
    }

    #[test]
    fn analytic_matches_horner(g in proptest::collection::vec(-9i64..9, 1..5), h in proptest::collection::vec(-9i64..9, 1..4)) {
        prop_assert_eq!(analytic_compose(&ints(&g), &ints(&h), 12), horner_compose(&ints(&g), &ints(&h), 12));
    }
}
