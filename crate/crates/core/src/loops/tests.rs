use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::ultrametric::Norm;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn class(n: usize, values: &[usize], cap: usize) -> LoopClass {
    LoopClass::new(n, 0, values.to_vec(), Some(cap)).unwrap()
}

#[test]
fn constant_map_is_the_unit() {
    let f = PinnedMap::new(vec![0; 4], 0, 3, 0).unwrap();
    assert!(class_of(&f).unwrap().is_unit());
    assert_eq!(class_of(&f).unwrap().to_string(), "{}");
}

#[test]
fn maps_hitting_the_other_point_once_are_identified() {
    let f = PinnedMap::new(vec![0, 1, 0], 0, 2, 0).unwrap();
    let g = PinnedMap::new(vec![0, 0, 1], 0, 2, 0).unwrap();
    assert_eq!(class_of(&f).unwrap(), class_of(&g).unwrap());
    let orbit = orbits(3, 0, 2, 0).into_iter().find(|o| o.contains(&f.table)).unwrap();
    assert!(orbit.contains(&g.table));
}

#[test]
fn four_points_into_three_give_ten_classes() {
    assert_eq!(all_classes(4, 3).len(), 10);
    assert_eq!(orbits(4, 0, 3, 0).len(), 10);
}

#[test]
fn class_count_matches_orbits_and_multiset_formula() {
    for m in 1..=5usize {
        for n in 1..=4usize {
            let classes = all_classes(m, n);
            let expected = binomial((m - 1 + n - 1) as u64, (n - 1) as u64) as usize;
            assert_eq!(classes.len(), expected, "m = {m}, n = {n}");
            for orbit in orbits(m, 0, n, 0) {
                let labels: std::collections::BTreeSet<_> =
                    orbit.iter().map(|t| class_of(&PinnedMap::new(t.clone(), 0, n, 0).unwrap()).unwrap()).collect();
                assert_eq!(labels.len(), 1);
            }
        }
    }
}

#[test]
fn basepoint_is_enforced() {
    assert!(matches!(PinnedMap::new(vec![1, 0], 0, 2, 0), Err(Error::BasepointViolated(_))));
    assert!(matches!(PinnedMap::new(vec![0, 2], 0, 2, 0), Err(Error::InvalidArgument(_))));
    let f = PinnedMap::new(vec![0, 1, 2], 0, 3, 0).unwrap();
    let moves_base = crate::tower::Perm::transposition(3, 0, 1);
    assert!(matches!(f.precompose(&moves_base), Err(Error::BasepointViolated(_))));
}

#[test]
fn wedge_of_singletons_and_unit() {
    let a = class(3, &[1], 3);
    let b = class(3, &[2], 3);
    let ab = wedge(&a, &b, &ChiSpec::identity(3)).unwrap();
    assert_eq!(ab.values, vec![1, 2]);
    assert_eq!(ab.to_string(), "{1,2}");
    let unit = LoopClass::unit(3, 0, Some(3));
    assert_eq!(wedge(&a, &unit, &ChiSpec::interleaved(3)).unwrap(), a);
}

#[test]
fn wedge_is_independent_of_chi() {
    let a = class(4, &[1, 3], 4);
    let b = class(4, &[2, 3], 4);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let reference = wedge(&a, &b, &ChiSpec::identity(4)).unwrap();
    for _ in 0..20 {
        let mut order: Vec<usize> = (0..8).collect();
        for i in (1..8).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        assert_eq!(wedge(&a, &b, &ChiSpec(order)).unwrap(), reference);
    }
    assert!(matches!(wedge(&a, &b, &ChiSpec(vec![0, 0, 1, 2, 3, 4, 5, 6])), Err(Error::InvalidArgument(_))));
}

#[test]
fn wedge_capacity() {
    let a = class(2, &[1, 1], 2);
    let b = class(2, &[1], 2);
    assert!(matches!(wedge(&a, &b, &ChiSpec::identity(2)), Err(Error::CapacityExceeded { size: 3, cap: 2 })));
    let ua = LoopClass::new(2, 0, vec![1, 1], None).unwrap();
    let ub = LoopClass::new(2, 0, vec![1], None).unwrap();
    let slots = wedge_slots(&ua, &ub);
    assert_eq!(wedge(&ua, &ub, &ChiSpec::reversed(slots)).unwrap().values, vec![1, 1, 1]);
    let other = LoopClass::new(3, 0, vec![1], Some(2)).unwrap();
    assert!(matches!(wedge(&a, &other, &ChiSpec::identity(2)), Err(Error::Incompatible(_))));
}

#[test]
fn monoid_laws_hold_exhaustively() {
    for m in 1..=5 {
        for n in 1..=4 {
            let r = monoid_law_check(m, n).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }
}

#[test]
fn grothendieck_rank_is_flagged() {
    let r = group_rank(4);
    assert_eq!((r.rank, r.claimed_rank), (3, 4));
    assert!(r.discrepancy);
    let g = grothendieck(&class(4, &[1, 1, 3], 3));
    assert_eq!(g.coords, vec![2, 0, 1]);
    assert!(g.add(&g.neg()).unwrap().is_zero());
}

#[test]
fn grothendieck_with_interior_basepoint() {
    let c = LoopClass::new(4, 2, vec![0, 3, 3], None).unwrap();
    let g = grothendieck(&c);
    assert_eq!(g.coords, vec![1, 0, 2]);
    assert_eq!((0..3).map(|i| g.value(i)).collect::<Vec<_>>(), vec![0, 1, 3]);
}

#[test]
fn baire_examples() {
    assert!(baire_distance(&[1, 2, 3], &[1, 2, 3], 2).is_zero());
    assert_eq!(baire_distance(&[0, 2, 3], &[1, 2, 3], 2), Norm::one(2));
    assert_eq!(baire_distance(&[1, 2, 3], &[1, 2, 4], 3), Norm::from_valuation(3, 2));
    assert_eq!(baire_distance(&[1, 2], &[1, 2, 0], 3), Norm::from_valuation(3, 2));
}

#[test]
fn baire_ultrametric_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let mut seq = || -> Vec<u8> {
            let mut v: Vec<u8> = vec![rng.gen_range(0..2); 6];
            for x in v.iter_mut() {
                if rng.gen_bool(0.3) {
                    *x = rng.gen_range(0..3);
                }
            }
            v
        };
        let (f, g, h) = (seq(), seq(), seq());
        let d = |a: &[u8], b: &[u8]| baire_distance(a, b, 2);
        assert!(d(&f, &h) <= d(&f, &g).max(d(&g, &h)));
        assert_eq!(d(&f, &g), d(&g, &f));
        assert_eq!(d(&f, &g).is_zero(), f == g);
    }
}

#[test]
fn zero_and_constant_threads() {
    let zeros: Vec<_> = (1..=3).map(|k| LoopGroupElement::zero(2usize.pow(k), 0)).collect();
    let maps: Vec<_> = (1..3).map(|k| reduction_map(2, k)).collect();
    let r = loop_thread_check(&zeros, &maps, 2, 4).unwrap();
    assert!(r.compatible);
    assert!(r.coordinates.iter().flatten().flatten().all(|&d| d == 0));

    let c = LoopGroupElement::from_coords(3, 0, vec![5, -1]).unwrap();
    let id = vec![0, 1, 2];
    let r = loop_thread_check(&[c.clone(), c.clone(), c], &[id.clone(), id], 3, 3).unwrap();
    assert_eq!(r.coordinates[0], vec![vec![2, 1, 0], vec![2, 2, 2]]);
}

#[test]
fn projected_family_is_a_thread() {
    let values = [0i64, 1, 3, 6, -2, 7];
    let levels: Vec<_> = (1..=3).map(|k| grothendieck(&class_of(&project_family(&values, 0, 2, k).unwrap()).unwrap())).collect();
    let maps: Vec<_> = (1..3).map(|k| reduction_map(2, k)).collect();
    assert!(loop_thread_check(&levels, &maps, 2, 5).unwrap().compatible);
}

#[test]
fn incompatible_thread_is_reported() {
    let lo = LoopGroupElement::from_coords(2, 0, vec![1]).unwrap();
    let hi = LoopGroupElement::from_coords(4, 0, vec![1, 0, 1]).unwrap();
    let err = loop_thread_check(&[lo, hi], &[reduction_map(2, 1)], 2, 3).unwrap_err();
    assert!(matches!(err, Error::Incompatible(_)));
}

#[test]
fn padic_digits_of_negatives() {
    assert_eq!(padic_digits(-1, 2, 4), vec![1, 1, 1, 1]);
    assert_eq!(padic_digits(-3, 5, 3), vec![2, 4, 4]);
    assert_eq!(padic_digits(12, 3, 4), vec![0, 1, 1, 0]);
}

proptest! {
    #[test]
    fn grothendieck_is_additive(a in prop::collection::vec(1usize..5, 0..6), b in prop::collection::vec(1usize..5, 0..6)) {
        let ca = LoopClass::new(5, 0, a, None).unwrap();
        let cb = LoopClass::new(5, 0, b, None).unwrap();
        let slots = wedge_slots(&ca, &cb);
        let ab = wedge(&ca, &cb, &ChiSpec::interleaved(slots)).unwrap();
        prop_assert_eq!(grothendieck(&ab), grothendieck(&ca).add(&grothendieck(&cb)).unwrap());
        prop_assert_eq!(ab.cancel(&cb), Some(ca));
    }
}
