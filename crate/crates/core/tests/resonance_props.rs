use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use wirent_core::resonance::{find_resonances, zero_alignment, DEFAULT_TOL};
use wirent_core::{DeltaChain, EntanglementReport};

/// Transmission through two equal deltas is unity when
/// `k d = π/2 + atan(u / 2k) + nπ` (internal units, `d = 1`).
/// Solved here by plain bisection, then converted to `2π/d` units.
fn phase_condition_root(u_user: f64, n: u32) -> f64 {
    let u = 2.0 * PI * u_user;
    let f = |k: f64| k - FRAC_PI_2 - (u / (2.0 * k)).atan() - n as f64 * PI;
    let (mut lo, mut hi) = (FRAC_PI_2 + n as f64 * PI, (n as f64 + 1.0) * PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi) / (2.0 * PI)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resonances_satisfy_phase_condition(u in 0.005..1.0f64) {
        let found = find_resonances(u, 1.0, 0.1, 2.0, DEFAULT_TOL).unwrap();
        prop_assert_eq!(found.len(), 4);
        for (n, res) in found.iter().enumerate() {
            let expected = phase_condition_root(u, n as u32);
            prop_assert!((res.k_res - expected).abs() < 1e-9,
                "n={} got {} want {}", n, res.k_res, expected);
            prop_assert!((res.transmission_at_peak - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn concurrence_zeros_sit_on_channel_two_resonances(
        u in 0.005..0.05f64,
        k1 in 0.6..1.4f64,
    ) {
        let chain = DeltaChain::uncoupled(u, u).unwrap();
        let eta = |dk: f64| {
            let s = chain.smatrix(k1, k1 + dk).unwrap();
            EntanglementReport::analyze(&s).unwrap().eta().unwrap_or(0.0)
        };
        let curve: Vec<(f64, f64)> = (0..=1000)
            .map(|i| {
                let dk = 1.5 * i as f64 / 1000.0;
                (dk, eta(dk))
            })
            .collect();
        // Padded so a peak within one scan sample of the sweep edge is found.
        let res: Vec<f64> = find_resonances(u, 1.0, k1 - 0.1, k1 + 1.6, DEFAULT_TOL)
            .unwrap()
            .iter()
            .map(|r| r.k_res)
            .collect();
        let al = zero_alignment(k1, &curve, eta, &res, DEFAULT_TOL);
        prop_assert!(al.unmatched().count() == 0, "{:?}", al);
    }
}

#[test]
fn reference_positions_at_one_percent_coupling() {
    // 40-digit transfer-matrix values.
    let expected = [
        0.2531431670238344,
        0.7510595205014172,
        1.2506362924860464,
        1.75045460907532,
    ];
    let found = find_resonances(0.01, 1.0, 0.1, 2.0, DEFAULT_TOL).unwrap();
    assert_eq!(found.len(), expected.len());
    for (r, e) in found.iter().zip(expected) {
        assert!((r.k_res - e).abs() < 1e-9, "{} vs {}", r.k_res, e);
    }
}
