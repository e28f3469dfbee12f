mod common;

use proptest::prelude::*;
use zetaladder::zeta::{
    modulus_sq_batch, theta, z_function, zeta_real_axis, ArgumentTrack, Method,
};

#[test]
fn oracle_reproduces_published_values() {
    // Z(100) and θ(100) to 20 digits
    let z100 = common::z(100.0);
    assert!((z100.to_f64() - 2.692_697_056_664_463_5).abs() < 1e-15);
    let th = common::theta(100.0);
    assert!((th.to_f64() - 87.972_165_231_787_22).abs() < 1e-12);
}

#[test]
fn theta_matches_oracle() {
    for t in [1.0, 3.7, 9.99, 10.0, 2.0 * std::f64::consts::PI * std::f64::consts::E.powi(2), 100.0, 1234.5, 1e5] {
        let got = theta(t).unwrap();
        let want = common::theta(t).to_f64();
        assert!((got - want).abs() <= 1e-9, "t={t}: {got} vs {want}");
    }
    assert!(theta(0.99).is_err());
}

#[test]
fn first_zeros_located() {
    let first = common::z_zero(14.0, 14.3);
    let second = common::z_zero(20.9, 21.1);
    assert!((first - 14.134_725).abs() < 1e-6);
    assert!((second - 21.022_040).abs() < 1e-6);
    assert!(z_function(14.134_725).unwrap().z_value.abs() <= 1e-4);
    assert!(z_function(21.022_040).unwrap().z_value.abs() <= 1e-4);
    assert!(z_function(first).unwrap().z_value.abs() <= 1e-9);
}

#[test]
fn z_at_100_relative_accuracy() {
    let s = z_function(100.0).unwrap();
    let want = common::z_f64(100.0);
    assert_eq!(s.method, Method::RiemannSiegel);
    assert!(((s.z_value - want) / want).abs() <= 1e-6);
    assert_eq!(s.modulus_sq, s.z_value * s.z_value);
}

#[test]
fn euler_maclaurin_branch_matches_oracle() {
    for t in [10.0, 17.3, 29.9, 44.4, 49.99] {
        let s = z_function(t).unwrap();
        assert_eq!(s.method, Method::EulerMaclaurin);
        let want = common::z_f64(t);
        assert!((s.z_value - want).abs() <= s.z_abs_error.max(1e-12), "t={t}");
    }
}

#[test]
fn zero_positions_match_oracle_up_to_1000() {
    let oracle = common::z_zeros(10.0, 1000.0, 0.25);
    // N(1000) = 649
    assert_eq!(oracle.len(), 649);
    let track = ArgumentTrack::new(1000.0, 1.0).unwrap();
    let ours: Vec<f64> = track.zeros().iter().copied().filter(|&g| g >= 10.0).collect();
    assert_eq!(ours.len(), oracle.len());
    for (a, b) in ours.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-4, "{a} vs {b}");
    }
}

#[test]
fn s_at_100_agrees_with_zero_count() {
    let count = common::z_zeros(10.0, 100.0, 0.05).len();
    assert_eq!(count, 29);
    let track = ArgumentTrack::new(120.0, 1.0).unwrap();
    let s = track.sample(100.0).unwrap();
    let want = count as f64 - 1.0 - common::theta(100.0).to_f64() / std::f64::consts::PI;
    assert!((s.s_value - want).abs() < 1e-9);
}

#[test]
fn s1_stable_under_step_halving() {
    let coarse = ArgumentTrack::new(60.0, 1.0).unwrap();
    let fine = ArgumentTrack::new(60.0, 0.5).unwrap();
    let a = coarse.s1_value(50.0).unwrap();
    let b = fine.s1_value(50.0).unwrap();
    assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
    assert!(coarse.s1_value(1e-12).unwrap().abs() < 1e-10);
}

#[test]
fn s1_matches_direct_quadrature_of_s() {
    // ∫ S with S from the oracle zero count, by Simpson sums between zeros
    let track = ArgumentTrack::new(40.0, 1.0).unwrap();
    let zeros = common::z_zeros(10.0, 40.0, 0.05);
    let mut edges = vec![1e-9];
    edges.extend(&zeros);
    edges.push(40.0);
    let mut sum = 0.0;
    for (count, w) in edges.windows(2).enumerate() {
        let n = 2 * (100.0 * (w[1] - w[0])).ceil() as usize;
        let h = (w[1] - w[0]) / n as f64;
        for i in 0..=n {
            let u = w[0] + i as f64 * h;
            let weight = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            let s = count as f64 - 1.0 - common::theta(u).to_f64() / std::f64::consts::PI;
            sum += weight * h / 3.0 * s;
        }
    }
    let got = track.s1_value(40.0).unwrap();
    assert!((got - sum).abs() < 1e-7, "{got} vs {sum}");
}

#[test]
fn batch_is_bitwise_pointwise() {
    let ts = [100.0, 200.0, 300.0, 1e4, 12345.678];
    let batch = modulus_sq_batch(&ts).unwrap();
    for (b, &t) in batch.iter().zip(&ts) {
        let p = z_function(t).unwrap();
        assert_eq!(b.z_value.to_bits(), p.z_value.to_bits());
        assert_eq!(b.modulus_sq.to_bits(), p.modulus_sq.to_bits());
    }
}

#[test]
fn real_axis_against_constants() {
    let pi = std::f64::consts::PI;
    assert!((zeta_real_axis(2.0).unwrap() - 1.644_934_066_8).abs() <= 1e-9);
    assert!((zeta_real_axis(4.0).unwrap() - 1.082_323_233_7).abs() <= 1e-9);
    for s in [1.1, 1.5, 3.0, 7.25] {
        let got = zeta_real_axis(s).unwrap();
        assert!((got - common::zeta_real(s)).abs() <= 1e-10, "s={s}");
    }
    assert!((zeta_real_axis(2.0).unwrap() - pi * pi / 6.0).abs() < 1e-12);
    assert!(zeta_real_axis(1.05).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn modulus_within_error_bound(t in 50.0f64..10_000.0) {
        let s = z_function(t).unwrap();
        let want = common::modulus_sq(t);
        let err = (s.modulus_sq - want).abs();
        prop_assert!(err <= s.est_abs_error.max(1e-8), "t={} err={:e} bound={:e}", t, err, s.est_abs_error);
    }
}
