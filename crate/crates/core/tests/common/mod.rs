//! Test oracles kept independent of the library's own algorithms.
#![allow(dead_code)]

use meshplan_core::dimension::{build_with_link_capacities, MeshSpec};
use meshplan_core::units::CapacityKbps;
use meshplan_core::{brute_force_min_cut, build_augmented};
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Exact Erlang-B by the direct factorial sum, for rational
/// `offered = p / q`, rounded once to the nearest `f64`.
pub fn erlang_b_exact(p: u64, q: u64, k: u64) -> f64 {
    let p = BigUint::from(p);
    let q = BigUint::from(q);
    // B = (A^k / k!) / sum_i A^i / i!; scale by k! q^k.
    let mut den = BigUint::zero();
    let mut falling = BigUint::one(); // k! / i! for i = k down to 0
    for i in (0..=k).rev() {
        den += p.pow(i as u32) * q.pow((k - i) as u32) * &falling;
        falling *= BigUint::from(i.max(1));
    }
    ratio_to_f64(&p.pow(k as u32), &den)
}

/// Correctly rounded (half-even) `num / den`, including subnormals.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // e = floor(log2(num / den))
    let mut e = num.bits() as i64 - den.bits() as i64;
    let ge = |e: i64| {
        if e >= 0 {
            *num >= (den << e as usize)
        } else {
            (num << (-e) as usize) >= *den
        }
    };
    if !ge(e) {
        e -= 1;
    }
    if e > 1023 {
        return f64::INFINITY;
    }
    // value = m * 2^p with 53 significant bits, or the subnormal grid.
    let p = (e - 52).max(-1074);
    let (n, d) = if p >= 0 {
        (num.clone(), den << p as usize)
    } else {
        (num << (-p) as usize, den.clone())
    };
    let mut m = &n / &d;
    let twice_rem: BigUint = (&n % &d) << 1usize;
    if twice_rem > d || (twice_rem == d && m.bit(0)) {
        m += 1u32;
    }
    let m = u64::try_from(m).expect("at most 54 bits") as f64;
    // Both steps are exact: the final value is representable.
    m * 2f64.powi((p + 600) as i32) * 2f64.powi(-600)
}

/// Relative error with the convention that two equal values (including two
/// zeros) agree exactly.
pub fn relative_error(actual: f64, expected: f64) -> f64 {
    if actual == expected {
        0.0
    } else {
        ((actual - expected) / expected).abs()
    }
}

/// Smallest multiple of `granularity` (up to the first multiple >= Y) at
/// which the augmented mesh carries Y, by linear scan with the brute-force
/// cut oracle.
pub fn linear_scan_optimum(spec: &MeshSpec, granularity: u64) -> Option<u64> {
    let y = spec.demand().kbps();
    let top = y.div_ceil(granularity);
    (1..=top).map(|u| u * granularity).find(|&m| {
        brute_force_min_cut(&build_augmented(spec, CapacityKbps::from_kbps(m)))
            .unwrap()
            .kbps()
            == y
    })
}

/// Max flow (via the cut oracle) of the mesh re-capacitated link by link.
pub fn provisioned_cut(spec: &MeshSpec, caps: &[CapacityKbps]) -> u64 {
    let net = build_with_link_capacities(spec, caps).unwrap();
    brute_force_min_cut(&net).unwrap().kbps()
}
