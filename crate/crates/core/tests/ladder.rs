use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use zetaladder::grid::{GridStore, ZetaGrid};
use zetaladder::ladder::{reverse_iterate_extending, Ladder, LadderConstants};
use zetaladder::{EULER_GAMMA, LN_2PI};

fn grid() -> Arc<ZetaGrid> {
    static GRID: OnceLock<Arc<ZetaGrid>> = OnceLock::new();
    GRID.get_or_init(|| Arc::new(ZetaGrid::build(1.3e4, 1e-10).unwrap()))
        .clone()
}

// y with y ln y + (c − ln 2π) y + c0 = value, by plain bisection
fn invert_representation(value: f64, c0: f64) -> f64 {
    let f = |y: f64| y * y.ln() + (EULER_GAMMA - LN_2PI) * y + c0 - value;
    let (mut lo, mut hi) = (10.0, 1e7);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn phi1_inverts_the_representation() {
    let ladder = Ladder::new(grid());
    for t in [150.0, 1e3, 4321.0, 1e4] {
        let want = invert_representation(grid().j_integral(t).unwrap(), 0.0);
        let got = ladder.phi1(t).unwrap();
        assert!((got - want).abs() <= 1e-11 * t, "t={t}: {got} vs {want}");
    }
}

#[test]
fn reverse_then_forward_round_trips() {
    let ladder = Ladder::new(grid());
    for t in [1e3, 1e4] {
        let up = ladder.reverse_step(t).unwrap();
        let back = ladder.phi1(up).unwrap();
        assert!((back - t).abs() / t <= 1e-8);
        let down = ladder.phi1(t).unwrap();
        let again = ladder.reverse_step(down).unwrap();
        assert!((again - t).abs() / t <= 1e-8);
    }
    let table = ladder.reverse_iterate(1e3, 3).unwrap();
    assert_eq!(table.reverse.len(), 4);
    assert!(table.reverse_residuals.iter().all(|&r| r <= 1e-12));
    let forward = ladder.forward_iterate(table.reverse[3], 3).unwrap();
    for (f, r) in forward.forward.iter().zip(table.reverse.iter().rev()) {
        assert!((f - r).abs() / r <= 1e-10);
    }
}

#[test]
fn derivative_weight_integrates_to_phi1() {
    let ladder = Ladder::new(grid());
    let (a, b) = (2000.0, 2010.0);
    let integral = ladder.z_tilde_sq_integral(a, b, 1e-11).unwrap();
    let diff = ladder.phi1(b).unwrap() - ladder.phi1(a).unwrap();
    assert!((integral - diff).abs() <= 1e-7 * diff, "{integral} vs {diff}");
}

#[test]
fn gap_ratios_approach_one() {
    let ladder = Ladder::new(grid());
    let low = ladder.gap_diagnostics(1e3, 1).unwrap();
    let high = ladder.gap_diagnostics(1e4, 1).unwrap();
    assert_eq!(high.prime_count, 1229);
    assert!((high.rows[0].ratio - 1.0).abs() < (low.rows[0].ratio - 1.0).abs());
    assert!(high.rows[0].ratio > 0.8 && high.rows[0].ratio < 1.2);
    assert!((high.complement_ratio - 1.0).abs() < 0.05);
}

#[test]
fn c0_shift_follows_first_order_prediction() {
    let ladder = Ladder::new(grid());
    let s = ladder.c0_sensitivity(5000.0, 0.5).unwrap();
    assert!((s.shift - s.predicted_shift).abs() <= 1e-3 * s.predicted_shift.abs());
    let shifted = Ladder::with_constants(grid(), LadderConstants::with_c0(0.5));
    assert_eq!(shifted.phi1(5000.0).unwrap(), s.phi1_perturbed);
}

#[test]
fn extending_store_reaches_the_reverse_iterate() {
    let mut store = GridStore::in_memory();
    store.ensure(1100.0, 1e-8).unwrap();
    let (table, grid) =
        reverse_iterate_extending(&mut store, 1e-8, LadderConstants::default(), 1e3, 4).unwrap();
    assert!(grid.t_max() >= table.reverse[4]);
    assert!(table.reverse.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn domain_checks() {
    let ladder = Ladder::new(grid());
    assert!(ladder.phi1(50.0).is_err());
    assert!(ladder.phi1(2e4).is_err());
    assert!(ladder.reverse_iterate(1e3, 0).is_err());
    assert!(ladder.reverse_iterate(1e3, 11).is_err());
    assert!(ladder.forward_iterate(120.0, 5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi1_is_increasing_and_below_identity(a in 100.0f64..1.2e4, b in 100.0f64..1.2e4) {
        prop_assume!((a - b).abs() > 1e-6);
        let ladder = Ladder::new(grid());
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (pl, ph) = (ladder.phi1(lo).unwrap(), ladder.phi1(hi).unwrap());
        prop_assert!(pl < ph);
        prop_assert!(pl < lo && ph < hi);
    }

    #[test]
    fn reverse_step_inverts_phi1(t in 100.0f64..1.1e4) {
        let ladder = Ladder::new(grid());
        let up = ladder.reverse_step(t).unwrap();
        prop_assert!(up > t);
        prop_assert!((ladder.phi1(up).unwrap() - t).abs() <= 1e-10 * t);
    }
}
