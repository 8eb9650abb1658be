#![allow(dead_code)]

use proptest::prelude::*;
use wirent_core::{DeltaChain, C64};

/// `(chain, k1, k2)` with the draw ranges used throughout: couplings
/// `u11, u22 ∈ [0, 5]`, `|u12| ≤ 2`, wavenumbers in `(0.05, 3]`.
pub fn system(mixing: bool) -> impl Strategy<Value = (DeltaChain, f64, f64)> {
    let u12 = if mixing {
        (0.0..=2.0f64, 0.0..std::f64::consts::TAU)
            .prop_map(|(m, ph)| C64::from_polar(m, ph))
            .boxed()
    } else {
        Just(C64::new(0.0, 0.0)).boxed()
    };
    (0.0..=5.0f64, 0.0..=5.0f64, u12, 0.0501..=3.0f64, 0.0501..=3.0f64)
        .prop_map(|(a, b, c, k1, k2)| (DeltaChain::new(a, b, c).unwrap(), k1, k2))
}
