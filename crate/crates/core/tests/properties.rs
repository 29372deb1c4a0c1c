use approx::assert_abs_diff_eq;
use hsd_core::encoding::{decode, encode, max_ball_radius, FeatureVector};
use hsd_core::random::{mixed_state, point_in_ball, pure_state, rng_from_seed};
use hsd_core::state::{hsd_exact, hsd_squared_exact, make_werner, overlap_exact, permute_qubits, purity, QubitPermutation};
use proptest::prelude::*;
use rand::seq::SliceRandom;

#[test]
fn distance_equals_overlap_combination() {
    let mut rng = rng_from_seed(100);
    for i in 0..1000 {
        let dim = [2, 4, 8, 16][i % 4];
        let a = if i % 3 == 0 { pure_state(dim, &mut rng) } else { mixed_state(dim, &mut rng) };
        let b = mixed_state(dim, &mut rng);
        let direct = hsd_squared_exact(&a, &b).unwrap();
        let via = purity(&a) + purity(&b) - 2.0 * overlap_exact(&a, &b).unwrap();
        assert!((direct - via).abs() <= 1e-9, "dim {dim}: {direct} vs {via}");
    }
}

#[test]
fn distance_is_a_metric_on_samples() {
    let mut rng = rng_from_seed(101);
    for _ in 0..500 {
        let (a, b, c) = (mixed_state(4, &mut rng), mixed_state(4, &mut rng), pure_state(4, &mut rng));
        let ab = hsd_exact(&a, &b).unwrap();
        assert_eq!(ab, hsd_exact(&b, &a).unwrap());
        assert!(ab <= hsd_exact(&a, &c).unwrap() + hsd_exact(&c, &b).unwrap() + 1e-9);
        assert_eq!(hsd_exact(&a, &a).unwrap(), 0.0);
    }
}

#[test]
fn overlap_and_purity_ranges() {
    let mut rng = rng_from_seed(102);
    for dim in [2, 4, 8, 16] {
        for _ in 0..100 {
            let (a, b) = (mixed_state(dim, &mut rng), pure_state(dim, &mut rng));
            let o = overlap_exact(&a, &b).unwrap();
            assert!((0.0..=1.0).contains(&o));
            let p = purity(&a);
            assert!(p >= 1.0 / dim as f64 - 1e-12 && p <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn werner_distance_closed_form_grid() {
    let grid: Vec<f64> = (0..51).map(|i| i as f64 / 50.0).collect();
    let states: Vec<_> = grid.iter().map(|&p| make_werner(p).unwrap()).collect();
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let d2 = hsd_squared_exact(a, b).unwrap();
            assert!((d2 - 0.75 * (grid[i] - grid[j]).powi(2)).abs() <= 1e-10);
        }
    }
}

#[test]
fn permutation_preserves_spectrum() {
    let mut rng = rng_from_seed(103);
    for _ in 0..30 {
        let rho = mixed_state(16, &mut rng);
        let mut order: Vec<usize> = (0..4).collect();
        order.shuffle(&mut rng);
        let permuted = permute_qubits(&rho, &QubitPermutation::new(order).unwrap()).unwrap();
        for (x, y) in rho.eigenvalues().iter().zip(permuted.eigenvalues()) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
    }
}

#[test]
fn decode_encode_round_trip_on_random_states() {
    let mut rng = rng_from_seed(104);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let dim = if i % 2 == 0 { 2 } else { 4 };
        let rho = mixed_state(dim, &mut rng);
        let u = decode(&rho).unwrap();
        let back = decode(&encode(&u).unwrap()).unwrap();
        for (x, y) in u.components().iter().zip(back.components()) {
            worst = worst.max((x - y).abs());
        }
        assert!(u.norm() <= max_ball_radius(dim) + 1e-9);
    }
    assert!(worst <= 1e-10, "worst round-trip error {worst}");
}

fn qubit_ball_point() -> impl Strategy<Value = Vec<f64>> {
    (any::<u64>()).prop_map(|seed| point_in_ball(3, 0.5, &mut rng_from_seed(seed)))
}

fn two_qubit_safe_point() -> impl Strategy<Value = Vec<f64>> {
    (any::<u64>()).prop_map(|seed| point_in_ball(15, hsd_core::safe_radius(4), &mut rng_from_seed(seed)))
}

proptest! {
    #[test]
    fn encoding_is_scaled_isometry_qubit(u in qubit_ball_point(), v in qubit_ball_point()) {
        let (u, v) = (FeatureVector::new(u).unwrap(), FeatureVector::new(v).unwrap());
        let d = hsd_exact(&encode(&u).unwrap(), &encode(&v).unwrap()).unwrap();
        prop_assert!((d - 2f64.sqrt() * u.distance(&v)).abs() <= 1e-9);
    }

    #[test]
    fn encoding_is_scaled_isometry_two_qubits(u in two_qubit_safe_point(), v in two_qubit_safe_point()) {
        let (u, v) = (FeatureVector::new(u).unwrap(), FeatureVector::new(v).unwrap());
        let (a, b) = (encode(&u).unwrap(), encode(&v).unwrap());
        prop_assert!((hsd_exact(&a, &b).unwrap() - 2f64.sqrt() * u.distance(&v)).abs() <= 1e-9);
        prop_assert!((purity(&a) - (0.25 + 2.0 * u.norm().powi(2))).abs() <= 1e-10);
        let back = decode(&a).unwrap();
        prop_assert!(back.distance(&u) <= 1e-10);
    }

    #[test]
    fn werner_overlap_formula(p in -1.0f64/3.0..=1.0) {
        let w = make_werner(p).unwrap();
        prop_assert!((overlap_exact(&w, &w).unwrap() - (0.25 + 0.75 * p * p)).abs() <= 1e-12);
        w.validate().unwrap();
    }
}
