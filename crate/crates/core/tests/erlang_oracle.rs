mod common;

use common::{erlang_b_exact, ratio_to_f64, relative_error};
use meshplan_core::erlang_b;
use num_bigint::BigUint;

#[test]
fn ratio_conversion_rounds_correctly() {
    let r = |a: u64, b: u64| ratio_to_f64(&BigUint::from(a), &BigUint::from(b));
    assert_eq!(r(1, 3), 1.0 / 3.0);
    assert_eq!(r(2, 3), 2.0 / 3.0);
    assert_eq!(r(15, 4), 3.75);
    assert_eq!(r(1, 10), 0.1);
    assert_eq!(r(u64::MAX, 7), u64::MAX as f64 / 7.0);
    let tiny = ratio_to_f64(&BigUint::from(1u32), &(BigUint::from(1u32) << 1074usize));
    assert_eq!(tiny, f64::from_bits(1));
    let below = ratio_to_f64(&BigUint::from(1u32), &(BigUint::from(1u32) << 1076usize));
    assert_eq!(below, 0.0);
}

#[test]
fn oracle_known_values() {
    assert_eq!(erlang_b_exact(1, 1, 1), 0.5);
    assert_eq!(erlang_b_exact(2, 1, 0), 1.0);
    // 15^8/8! / sum_{i<=8} 15^i/i!
    assert!((erlang_b_exact(15, 1, 8) - 0.5192555704153473).abs() < 1e-16);
}

#[test]
fn recurrence_matches_direct_sum_on_wide_grid() {
    // A up to 10^3, k up to 10^3 at a coarser stride.
    let mut worst: f64 = 0.0;
    for &(p, q) in &[(1u64, 4u64), (3, 2), (7, 1), (40, 1), (250, 1), (1000, 1)] {
        for k in (1..=1000u64).step_by(37) {
            let exact = erlang_b_exact(p, q, k);
            let got = erlang_b(p as f64 / q as f64, k).unwrap();
            let err = relative_error(got, exact);
            worst = worst.max(err);
            assert!(
                err <= 1e-12,
                "A={p}/{q} k={k}: {got:e} vs {exact:e} (rel {err:e})"
            );
        }
    }
    println!("worst relative error {worst:e}");
}

#[test]
fn monotone_in_load_and_channels() {
    let loads: Vec<f64> = (1..=100).map(|i| f64::from(i) * 0.5).collect();
    for k in 1..=64u64 {
        let row: Vec<f64> = loads.iter().map(|&a| erlang_b(a, k).unwrap()).collect();
        assert!(
            row.windows(2).all(|w| w[1] > w[0]),
            "k={k} not increasing in A"
        );
    }
    for &a in &loads {
        let col: Vec<f64> = (1..=64).map(|k| erlang_b(a, k).unwrap()).collect();
        assert!(
            col.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0),
            "A={a} not decreasing in k"
        );
    }
}
