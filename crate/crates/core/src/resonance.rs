//! Transmission resonances of the double delta and the concurrence zeros
//! they produce.
//!
//! All wavenumbers, couplings and tolerances in this module are in units of
//! `2π/d`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scattering::{double_delta_closed_form, AmplitudePair};

/// A refined peak counts as a resonance when `1 − |t|² ≤ PEAK_DEFECT`.
pub const PEAK_DEFECT: f64 = 1e-10;

/// Default golden-section stopping width, `2π/d` units.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Scan density: samples per expected resonance spacing `π/d`.
pub const SAMPLES_PER_SPACING: f64 = 40.0;

/// Refined concurrence below this counts as an exact zero.
pub const ETA_ZERO: f64 = 1e-8;

/// Resonance spacing `π/d` expressed in `2π/d` units.
const SPACING_USER: f64 = 0.5;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub k_res: f64,
    pub transmission_at_peak: f64,
    /// Width of the final golden-section bracket.
    pub refinement_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceTable {
    pub channel: u32,
    /// Sorted ascending in `k_res`.
    pub entries: Vec<Resonance>,
}

impl ResonanceTable {
    pub fn positions(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.k_res).collect()
    }

    pub fn nearest(&self, k: f64) -> Option<f64> {
        nearest(&self.positions(), k)
    }
}

fn nearest(points: &[f64], k: f64) -> Option<f64> {
    points
        .iter()
        .copied()
        .min_by(|a, b| (a - k).abs().total_cmp(&(b - k).abs()))
}

/// Result of a bracketed one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub width: f64,
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Stops when the bracket is narrower than `tol` or stops shrinking in
/// floating point.
pub fn golden_section_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            if !(x1 > a && x1 < x2) {
                break;
            }
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            if !(x2 < b && x2 > x1) {
                break;
            }
            f2 = f(x2);
        }
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Minimum {
        x,
        value,
        width: b - a,
    }
}

fn amplitudes(u: f64, d: f64, k_user: f64) -> Result<AmplitudePair> {
    let unit = 2.0 * PI / d;
    double_delta_closed_form(u * unit, k_user * unit, d)
}

fn validate_range(k_lo: f64, k_hi: f64) -> Result<()> {
    if !(k_lo > 0.0 && k_hi > k_lo && k_hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need 0 < k_lo < k_hi, got [{k_lo}, {k_hi}]"
        )));
    }
    Ok(())
}

/// Samples needed for [`SAMPLES_PER_SPACING`] over `[k_lo, k_hi]`.
pub fn default_samples(k_lo: f64, k_hi: f64) -> usize {
    ((k_hi - k_lo) / SPACING_USER * SAMPLES_PER_SPACING).ceil() as usize + 1
}

/// `|t_jj(k)|²` on a uniform grid of `n_samples` points over `[k_lo, k_hi]`.
pub fn scan_transmission(
    u: f64,
    d: f64,
    k_lo: f64,
    k_hi: f64,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    validate_range(k_lo, k_hi)?;
    if n_samples < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    let step = (k_hi - k_lo) / (n_samples - 1) as f64;
    (0..n_samples)
        .map(|i| {
            let k = if i + 1 == n_samples {
                k_hi
            } else {
                k_lo + step * i as f64
            };
            Ok((k, amplitudes(u, d, k)?.transmission()))
        })
        .collect()
}

/// Unity-transmission peaks of one channel in `[k_lo, k_hi]`.
///
/// Interior local maxima of the default scan are refined by golden section
/// on `|r(k)|`. Since `|r|² + |t|² = 1` this has the same argmax as `|t|²`,
/// but `|r|` vanishes linearly at the peak rather than quadratically, which
/// keeps the refinement accurate to the last few ulps.
pub fn find_resonances(u: f64, d: f64, k_lo: f64, k_hi: f64, tol: f64) -> Result<Vec<Resonance>> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidInput(format!(
            "tolerance must lie in (0, 1e-6], got {tol}"
        )));
    }
    if !(d > 0.0) {
        return Err(Error::InvalidInput(format!("separation must be positive, got {d}")));
    }
    let scan = scan_transmission(u, d, k_lo, k_hi, default_samples(k_lo, k_hi))?;
    if u == 0.0 {
        return Ok(Vec::new());
    }
    let reflection = |k: f64| amplitudes(u, d, k).map(|a| a.r.norm()).unwrap_or(f64::INFINITY);
    let mut out = Vec::new();
    for w in scan.windows(3) {
        let (prev, mid, next) = (w[0].1, w[1].1, w[2].1);
        if !(mid > prev && mid >= next) {
            continue;
        }
        let m = golden_section_min(reflection, w[0].0, w[2].0, tol);
        let peak = amplitudes(u, d, m.x)?;
        if peak.reflection() <= PEAK_DEFECT {
            out.push(Resonance {
                k_res: m.x,
                transmission_at_peak: peak.transmission(),
                refinement_width: m.width,
            });
        }
    }
    Ok(out)
}

/// A refined concurrence zero and the resonance it is paired with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroMatch {
    /// Refined `Δk` of the zero.
    pub dk: f64,
    pub k2: f64,
    pub eta: f64,
    pub nearest_resonance: Option<f64>,
    /// `|k2 − k_res|`, infinite when no resonance is known.
    pub distance: f64,
    /// Within `10·tol` of a resonance.
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroAlignment {
    pub k1: f64,
    pub tol: f64,
    pub zeros: Vec<ZeroMatch>,
}

impl ZeroAlignment {
    pub fn unmatched(&self) -> impl Iterator<Item = &ZeroMatch> {
        self.zeros.iter().filter(|z| !z.matched)
    }

    pub fn max_distance(&self) -> f64 {
        self.zeros.iter().map(|z| z.distance).fold(0.0, f64::max)
    }
}

/// Refines the zeros of a sampled concurrence curve `(Δk, η)`.
///
/// Every strict interior local minimum is refined by golden section on `eta`
/// over its two neighbouring cells; those reaching `η < ETA_ZERO` are
/// returned as `(Δk, η)`. A curve that is identically zero has no isolated
/// zeros and yields nothing.
pub fn refine_zeros(curve: &[(f64, f64)], eta: impl Fn(f64) -> f64, tol: f64) -> Vec<(f64, f64)> {
    let mut zeros = Vec::new();
    for w in curve.windows(3) {
        let (prev, mid, next) = (w[0].1, w[1].1, w[2].1);
        if !(mid < prev && mid <= next) {
            continue;
        }
        let m = golden_section_min(&eta, w[0].0, w[2].0, tol);
        if m.value < ETA_ZERO {
            zeros.push((m.x, m.value));
        }
    }
    zeros
}

/// Pairs each concurrence zero along `k2 = k1 + Δk` with the nearest
/// resonance in `resonances` (`k` values, any channel).
pub fn zero_alignment(
    k1: f64,
    curve: &[(f64, f64)],
    eta: impl Fn(f64) -> f64,
    resonances: &[f64],
    tol: f64,
) -> ZeroAlignment {
    let zeros = refine_zeros(curve, eta, tol)
        .into_iter()
        .map(|(dk, eta)| {
            let k2 = k1 + dk;
            let nearest_resonance = nearest(resonances, k2);
            let distance = nearest_resonance.map_or(f64::INFINITY, |k| (k - k2).abs());
            ZeroMatch {
                dk,
                k2,
                eta,
                nearest_resonance,
                distance,
                matched: distance <= 10.0 * tol,
            }
        })
        .collect();
    ZeroAlignment { k1, tol, zeros }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const U0: f64 = 0.01;

    #[test]
    fn golden_section_finds_parabola_and_v_minima() {
        let m = golden_section_min(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((m.x - 0.3).abs() < 1e-7);
        let m = golden_section_min(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-14);
        assert!((m.x - 0.3).abs() < 1e-14);
        assert!(m.width <= 1e-14);
    }

    #[test]
    fn transparent_scan_is_flat() {
        let scan = scan_transmission(0.0, 1.0, 0.1, 1.5, 50).unwrap();
        assert_eq!(scan.len(), 50);
        assert!(scan.iter().all(|&(_, t)| (t - 1.0).abs() < 1e-15));
        assert_eq!(scan.last().unwrap().0, 1.5);
        assert!(find_resonances(0.0, 1.0, 0.1, 1.5, 1e-10).unwrap().is_empty());
    }

    #[test]
    fn scan_rejects_bad_input() {
        assert!(scan_transmission(U0, 1.0, 0.0, 1.0, 10).is_err());
        assert!(scan_transmission(U0, 1.0, 1.0, 0.5, 10).is_err());
        assert!(scan_transmission(U0, 1.0, 0.1, 1.0, 1).is_err());
        assert!(find_resonances(U0, 1.0, 0.1, 1.0, 1e-3).is_err());
        assert!(find_resonances(U0, 1.0, 0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn three_resonances_below_one_and_a_half() {
        // Reference positions: 40-digit root finding of the round-trip phase
        // condition 2 arg r₁(k) + 2kd = 2πn.
        let expected = [0.253_143_167_023_834_4, 0.751_059_520_501_417_2, 1.250_636_292_486_046_4];
        let found = find_resonances(U0, 1.0, 0.1, 1.5, 1e-10).unwrap();
        assert_eq!(found.len(), 3);
        for (res, want) in found.iter().zip(expected) {
            assert!((res.k_res - want).abs() < 1e-10, "{} vs {}", res.k_res, want);
            assert!(1.0 - res.transmission_at_peak <= PEAK_DEFECT);
            assert!(res.refinement_width <= 1e-10);
        }
    }

    #[test]
    fn scan_maxima_near_quarter_wave_positions() {
        let scan = scan_transmission(U0, 1.0, 0.1, 1.5, 400).unwrap();
        let maxima: Vec<f64> = scan
            .windows(3)
            .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1)
            .map(|w| w[1].0)
            .collect();
        assert_eq!(maxima.len(), 3);
        for (m, want) in maxima.iter().zip([0.25, 0.75, 1.25]) {
            assert!((m - want).abs() < 0.01);
        }
    }

    #[test]
    fn transmission_monotone_between_peak_and_trough() {
        // Rising flank from the trough at 0.5 to the peak near 0.751.
        let scan = scan_transmission(U0, 1.0, 0.5, 0.75, 200).unwrap();
        assert!(scan.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn resonances_approach_quarter_wave_as_coupling_vanishes() {
        let near = |u: f64| find_resonances(u, 1.0, 0.6, 0.9, 1e-10).unwrap()[0].k_res;
        let (full, half, quarter) = (near(0.04), near(0.02), near(0.01));
        let gap = |k: f64| (k - 0.75).abs();
        assert!(gap(full) > gap(half) && gap(half) > gap(quarter));
        // O(u) shift: halving u roughly halves the offset
        assert_relative_eq!(gap(full) / gap(half), 2.0, max_relative = 0.05);
    }

    #[test]
    fn resonance_positions_independent_of_length_unit() {
        let a = find_resonances(U0, 1.0, 0.1, 1.5, 1e-10).unwrap();
        let b = find_resonances(U0, 2.5, 0.1, 1.5, 1e-10).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.k_res - y.k_res).abs() < 1e-9);
        }
    }

    #[test]
    fn isolated_v_zero_is_refined_and_matched() {
        let curve: Vec<(f64, f64)> = (0..=100)
            .map(|i| {
                let x = i as f64 * 0.01;
                (x, (x - 0.4321).abs())
            })
            .collect();
        let report = zero_alignment(1.0, &curve, |x| (x - 0.4321).abs(), &[1.4321], 1e-12);
        assert_eq!(report.zeros.len(), 1);
        assert!(report.zeros[0].matched);
        assert!(report.max_distance() < 1e-11);

        let report = zero_alignment(1.0, &curve, |x| (x - 0.4321).abs(), &[1.6], 1e-12);
        assert_eq!(report.unmatched().count(), 1);
    }

    #[test]
    fn identically_zero_curve_has_no_isolated_zeros() {
        let curve: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.0)).collect();
        assert!(refine_zeros(&curve, |_| 0.0, 1e-10).is_empty());
    }
}
