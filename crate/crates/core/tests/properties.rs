mod common;

use commutant::conjugacy::class_count_by_degree;
use commutant::expsum::exp_sum;
use commutant::flatcheck::{aux_average, fibre_count, sigma_with, traceless_representatives, AuxPart, GroupCache};
use commutant::harmonic::{weight_w, weight_what};
use commutant::matfp::{ad_matrix, commutator, conjugate};
use commutant::matz::{commutant_lattice, congruence_count, count_lattice_in_box, count_n, IntMat};
use commutant::{Budget, FieldCtx, MatF};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(p: u32) -> FieldCtx {
    FieldCtx::new(p as u64).unwrap()
}

fn field_matrix(n: usize) -> impl Strategy<Value = (u32, Vec<i64>)> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(7)]
        .prop_flat_map(move |p| (Just(p), prop::collection::vec(0..p as i64, n * n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutators_are_traceless((p, x) in field_matrix(3), y in prop::collection::vec(0i64..7, 9)) {
        let k = ctx(p);
        let x = MatF::square(k, &x).unwrap();
        let y = MatF::square(k, &y).unwrap();
        prop_assert_eq!(commutator(&x, &y).unwrap().trace(), 0);
    }

    #[test]
    fn ad_matrix_acts_as_commutator((p, v) in field_matrix(3), u in prop::collection::vec(0i64..7, 9)) {
        let k = ctx(p);
        let v = MatF::square(k, &v).unwrap();
        let u = MatF::square(k, &u).unwrap();
        let image = ad_matrix(&v).mul_vec(&u.flatten());
        prop_assert_eq!(image, u.mul(&v).unwrap().sub(&v.mul(&u).unwrap()).unwrap().flatten());
    }

    #[test]
    fn lattice_box_count_matches_enumeration(x in prop::collection::vec(-3i64..=3, 4), t in 1i64..=2) {
        let xm = IntMat::new(2, x.clone()).unwrap();
        let lattice = commutant_lattice(&xm).unwrap();
        let counted = count_lattice_in_box(&lattice, t, Budget::default()).unwrap();
        let side = 2 * t + 1;
        let mut brute = 0u128;
        for idx in 0..side.pow(4) as u64 {
            let y = IntMat::from_box_index(2, t, idx);
            if xm.commutator(&y).unwrap().entries().iter().all(|&e| e == 0) {
                brute += 1;
            }
        }
        prop_assert_eq!(counted, brute);
    }

    #[test]
    fn exp_sum_conjugation_invariant(a in prop::collection::vec(0i64..3, 4), b in prop::collection::vec(0i64..3, 4), seed: u64) {
        let k = ctx(3);
        let a = MatF::square(k, &a).unwrap();
        let b = MatF::square(k, &b).unwrap();
        let g = MatF::random_invertible(k, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = exp_sum(&a, &b, Budget::default()).unwrap();
        let t = exp_sum(&conjugate(&g, &a).unwrap(), &conjugate(&g, &b).unwrap(), Budget::default()).unwrap();
        prop_assert_eq!(s, t);
    }

    #[test]
    fn fibre_conjugation_equivariant(m in prop::collection::vec(0i64..5, 4), seed: u64) {
        let k = ctx(5);
        let m = MatF::square(k, &m).unwrap();
        let g = MatF::random_invertible(k, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let a = fibre_count(&m, Budget::default()).unwrap().count;
        let b = fibre_count(&conjugate(&g, &m).unwrap(), Budget::default()).unwrap().count;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn weight_ranges(x in prop::collection::vec(-0.999f64..0.999, 4)) {
        let w = weight_w(&x);
        prop_assert!(w > 0.0 && w <= 1.0);
        let half: Vec<f64> = x.iter().map(|v| v / 2.0).collect();
        prop_assert!(weight_w(&half) >= (4.0 / (std::f64::consts::PI.powi(2))).powi(4) - 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert_eq!(weight_what(&x), weight_what(&neg));
        prop_assert!(weight_what(&x) > 0.0);
    }

    #[test]
    fn weight_what_support(x in prop::collection::vec(-3.0f64..3.0, 4)) {
        let outside = x.iter().any(|v| v.abs() >= 1.0);
        prop_assert_eq!(weight_what(&x) == 0.0, outside);
    }
}

#[test]
fn integer_counts_match_oracles() {
    let b = Budget::default();
    assert_eq!(count_n(2, 0, b).unwrap(), 1);
    assert_eq!(count_n(3, 0, b).unwrap(), 1);
    assert_eq!(count_n(2, 1, b).unwrap(), common::brute_commuting_box(2, 1));
    assert_eq!(count_n(2, 2, b).unwrap(), common::n2_commuting_box(2));
    let mut prev = 0;
    for t in 0..=4 {
        let n = count_n(2, t, b).unwrap();
        assert!(n > prev);
        prev = n;
    }
}

#[test]
fn congruence_dominates_integer_count() {
    let b = Budget::default();
    for t in 1..=2 {
        let n = count_n(2, t, b).unwrap();
        for p in [2u32, 3, 5, 7] {
            assert!(congruence_count(2, t, p, b).unwrap() >= n, "T={t}, p={p}");
        }
    }
}

#[test]
fn classes_by_radical_degree_are_bounded() {
    let mut worst: f64 = 0.0;
    for p in [2u32, 3, 5, 7] {
        for d in 1..=2 {
            let c = class_count_by_degree(2, p, d, Budget::default()).unwrap();
            worst = worst.max(c as f64 / (p as f64).powi(d as i32));
        }
    }
    assert!(worst <= 3.0, "{worst}");
}

#[test]
fn sigma_bounded_uniformly() {
    let mut worst: f64 = 0.0;
    for p in [3u32, 5, 7] {
        let classes = commutant::conjugacy::enumerate_classes(2, p, Budget::default()).unwrap();
        let group = GroupCache::new(ctx(p), 2, Budget::default()).unwrap();
        for m in traceless_representatives(&classes) {
            let s = sigma_with(&m, Some(&classes), Some(&group), Budget::default()).unwrap();
            worst = worst.max(s.normalized);
        }
    }
    assert!(worst <= 8.0, "{worst}");
}

#[test]
fn gl_averages_sampled_for_n3() {
    let k = ctx(3);
    let group = GroupCache::new(k, 3, Budget::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..6 {
        let m = MatF::random(k, 3, &mut rng);
        if m.is_zero() {
            continue;
        }
        for kk in 1..3 {
            for part in AuxPart::ALL {
                let r = aux_average(&m, kk, part, &group).unwrap();
                assert!(r.ratio <= 8.0, "{r:?}");
            }
        }
    }
}

#[test]
fn trace_pairing_is_nondegenerate_on_random_samples() {
    let k = ctx(5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let x = MatF::random(k, 3, &mut rng);
        if x.is_zero() {
            continue;
        }
        let found = (0..3).any(|i| (0..3).any(|j| x.trace_pairing(&MatF::unit(k, 3, i, j)) != 0));
        assert!(found);
    }
}

#[test]
fn every_traceless_matrix_is_a_commutator() {
    for p in [2u32, 3, 5] {
        for m in common::all_matrices(ctx(p), 2).iter().filter(|m| m.trace() == 0) {
            assert!(fibre_count(m, Budget::default()).unwrap().count > 0, "{m:?}");
        }
    }
}
