use std::sync::Arc;

use zetaladder::grid::ZetaGrid;
use zetaladder::ladder::Ladder;
use zetaladder::ortho::Generator;

fn generator(t: f64) -> Generator {
    let grid = Arc::new(ZetaGrid::build(t * 1.6, 1e-10).unwrap());
    Generator::new(Ladder::new(grid), t).unwrap()
}

// Legendre polynomials by explicit coefficients, independent of any recurrence
fn legendre_explicit(n: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..=n / 2 {
        let num = (1..=(2 * n - 2 * k)).map(|i| i as f64).product::<f64>();
        let den = (1..=k).map(|i| i as f64).product::<f64>()
            * (1..=(n - k)).map(|i| i as f64).product::<f64>()
            * (1..=(n - 2 * k)).map(|i| i as f64).product::<f64>();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * num / den * x.powi((n - 2 * k) as i32);
    }
    sum / 2f64.powi(n as i32)
}

#[test]
fn zero_depth_reproduces_classical_gram() {
    let g = generator(1e3);
    let sys = g.gram_matrix([0, 0, 0], 8).unwrap();
    for n in 0..=8 {
        for m in 0..=8 {
            let want = if n == m { 2.0 / (2 * n + 1) as f64 } else { 0.0 };
            assert!((sys.gram[n][m] - want).abs() <= 1e-10, "({n},{m}) = {}", sys.gram[n][m]);
        }
    }
    for x in [-0.9, -0.2, 0.35, 1.0] {
        for n in 0..=8 {
            let got = g.generated_function([0, 0, 0], n, x).unwrap();
            assert!((got - legendre_explicit(n, x)).abs() <= 1e-12);
        }
    }
}

#[test]
fn depth_one_system_is_orthogonal_at_1000() {
    let g = generator(1e3);
    let sys = g.gram_matrix([1, 1, 1], 6).unwrap();
    assert!(sys.containment_ok);
    assert!(sys.max_off_diagonal(6) <= 1e-3, "{}", sys.max_off_diagonal(6));
    for n in 0..=6 {
        let rel = (sys.gram[n][n] - sys.diagonal_expected[n]).abs() / sys.diagonal_expected[n];
        assert!(rel <= 1e-3, "n={n}: {rel:e}");
    }
}

#[test]
fn automorphism_maps_the_interval_onto_itself() {
    let g = generator(500.0);
    for p in 1..=3 {
        let lo = g.automorphism_u(p, -1.0).unwrap();
        let hi = g.automorphism_u(p, 1.0).unwrap();
        assert!((lo + 1.0).abs() <= 1e-8, "p={p}: {lo}");
        assert!((hi - 1.0).abs() <= 1e-8, "p={p}: {hi}");
        let mut prev = lo;
        for i in 1..=20 {
            let u = g.automorphism_u(p, -1.0 + 0.1 * i as f64).unwrap();
            assert!(u >= prev);
            prev = u;
        }
    }
}

#[test]
fn log_decomposition_rebuilds_the_weight() {
    let g = generator(500.0);
    let depths = [1, 2, 1];
    let t = 0.123;
    let factors = g.log_decomposition(depths, t).unwrap();
    assert_eq!(factors.len(), 4);
    let ln_weight: f64 = factors.iter().map(|f| f.ln_zeta_modulus + f.ln_slope_half).sum();
    let value = g.generated_function(depths, 0, t).unwrap();
    assert!((ln_weight.exp() - value).abs() <= 1e-10 * value);
}

#[test]
fn rejects_out_of_range_parameters() {
    let g = generator(300.0);
    assert!(g.gram_matrix([0, 0, 4], 2).is_err());
    assert!(g.gram_matrix([0, 0, 0], 9).is_err());
    assert!(g.automorphism_u(1, 1.5).is_err());
    let grid = Arc::new(ZetaGrid::build(400.0, 1e-9).unwrap());
    assert!(Generator::new(Ladder::new(grid), 2e4).is_err());
}
