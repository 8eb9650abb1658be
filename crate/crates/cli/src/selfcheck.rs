//! Invariant suite behind `wirent selfcheck`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wirent_core::entangle::{probability_budget, NORM_FLOOR};
use wirent_core::oracle::{fd_scatter_extrapolated, OracleConfig};
use wirent_core::resonance::{zero_alignment, ZeroAlignment, DEFAULT_TOL, ETA_ZERO};
use wirent_core::scattering::unitarity_defect;
use wirent_core::{resonance_table, DeltaChain, EntanglementReport, ScattererS, C64};

use crate::config::grid_point;
use crate::CliError;

pub const EXACT_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-6;
/// Allowed distance between a concurrence zero and its resonance (`2π/d`).
pub const ZERO_MATCH_TOL: f64 = 1e-8;

/// Deliberate defects for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Every S-matrix checked for unitarity is scaled by 1.1.
    UnitarityScale,
}

#[derive(Debug, Clone)]
pub struct SelfcheckOptions {
    pub draws: usize,
    pub seed: u64,
    pub oracle: bool,
    pub fault: Option<Fault>,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        SelfcheckOptions {
            draws: 1000,
            seed: 0x5eed_2009,
            oracle: false,
            fault: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelfcheckReport {
    pub suites: Vec<SuiteResult>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let tag = if s.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag} {}: {}", s.name, s.detail);
        }
        let ok = self.suites.iter().filter(|s| s.passed).count();
        let _ = writeln!(
            out,
            "{} {}/{} suites",
            if self.passed() { "PASS" } else { "FAIL" },
            ok,
            self.suites.len()
        );
        out
    }
}

/// Random double-delta system: `u11, u22 ∈ [0, 5]`, `|u12| ∈ [0, 2]` with a
/// uniform phase (zero when `mixing` is off), `k1, k2 ∈ (0.05, 3]`.
pub fn random_system(rng: &mut impl Rng, mixing: bool) -> (DeltaChain, f64, f64) {
    let u12 = if mixing {
        C64::from_polar(rng.gen_range(0.0..=2.0), rng.gen_range(0.0..2.0 * PI))
    } else {
        C64::new(0.0, 0.0)
    };
    let chain = DeltaChain::new(rng.gen_range(0.0..=5.0), rng.gen_range(0.0..=5.0), u12)
        .expect("finite couplings");
    let mut k = || 3.0 - rng.gen_range(0.0..2.95);
    let (k1, k2) = (k(), k());
    (chain, k1, k2)
}

fn draws(opts: &SelfcheckOptions, mixing: bool) -> Vec<ScattererS> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ mixing as u64);
    (0..opts.draws)
        .map(|_| {
            let (chain, k1, k2) = random_system(&mut rng, mixing);
            chain.smatrix(k1, k2).expect("valid random system")
        })
        .collect()
}

fn suite(name: &'static str, worst: f64, tol: f64, what: &str) -> SuiteResult {
    SuiteResult {
        name,
        passed: worst <= tol,
        detail: format!("max {what} {worst:.3e} (tol {tol:.0e})"),
    }
}

/// Concurrence zeros along `k2 = k1 + Δk` paired with channel-2 resonances.
const EDGE_PAD: f64 = 0.05;

pub struct SliceZeros {
    pub alignment: ZeroAlignment,
    /// Channel-2 resonances in and slightly around the sweep.
    pub resonances: Vec<f64>,
    /// Largest refined `η` at a resonance inside the sweep.
    pub eta_at_resonances: f64,
}

pub fn slice_zeros(
    chain: &DeltaChain,
    k1: f64,
    dk_min: f64,
    dk_max: f64,
    steps: usize,
) -> Result<SliceZeros, CliError> {
    let eta = |dk: f64| {
        chain
            .smatrix(k1, k1 + dk)
            .ok()
            .and_then(|s| EntanglementReport::analyze(&s).ok())
            .and_then(|r| r.eta())
            .unwrap_or(0.0)
    };
    let curve: Vec<(f64, f64)> = (0..steps)
        .map(|j| {
            let dk = grid_point(dk_min, dk_max, steps, j);
            (dk, eta(dk))
        })
        .collect();
    // Padded so a peak within one scan sample of the sweep edge is found.
    let lo = (k1 + dk_min - EDGE_PAD).max(0.5 * (k1 + dk_min));
    let table = resonance_table(chain, 2, lo, k1 + dk_max + EDGE_PAD, DEFAULT_TOL)?;
    let resonances = table.positions();
    let eta_at_resonances = resonances
        .iter()
        .filter(|&&k| k >= k1 + dk_min && k <= k1 + dk_max)
        .map(|&k| eta(k - k1))
        .fold(0.0, f64::max);
    Ok(SliceZeros {
        alignment: zero_alignment(k1, &curve, eta, &resonances, DEFAULT_TOL),
        resonances,
        eta_at_resonances,
    })
}

/// Analytic/oracle comparison points: `(u11, u22, u12, k1, k2)` in `2π/d` units.
pub const ORACLE_POINTS: [(f64, f64, (f64, f64), f64, f64); 5] = [
    (0.01, 0.01, (0.0, 0.0), 1.0, 1.0),
    (0.0, 0.0, (0.0, 0.0), 1.0, 0.7),
    (0.0, 0.0, (0.3, 0.0), 1.0, 1.0),
    (0.01, 0.01, (0.3, 0.0), 1.0, 0.8),
    (0.5, 0.2, (0.3, 0.2), 1.3, 0.7),
];

/// Largest amplitude deviation between oracle and analytic S over
/// [`ORACLE_POINTS`].
pub fn oracle_worst() -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for (u11, u22, (re, im), k1, k2) in ORACLE_POINTS {
        let chain = DeltaChain::new(u11, u22, C64::new(re, im))?;
        let exact = chain.smatrix(k1, k2)?;
        let fd = fd_scatter_extrapolated(&OracleConfig::new(chain.coupling(), exact.k1, exact.k2))?;
        worst = worst
            .max(fd.r.max_abs_diff(&exact.r))
            .max(fd.t.max_abs_diff(&exact.t))
            .max(unitarity_defect(&fd) * EXACT_TOL / ORACLE_TOL);
    }
    Ok(worst)
}

pub fn run_selfcheck(opts: &SelfcheckOptions) -> SelfcheckReport {
    let plain = draws(opts, false);
    let mixed = draws(opts, true);
    let all = || plain.iter().chain(mixed.iter());
    let reports: Vec<(bool, EntanglementReport)> = all()
        .zip(std::iter::repeat_n(false, plain.len()).chain(std::iter::repeat(true)))
        .map(|(s, mix)| (mix, EntanglementReport::analyze(s).expect("unitary draw")))
        .collect();
    let mut suites = Vec::new();

    let scale = match opts.fault {
        Some(Fault::UnitarityScale) => 1.1,
        None => 1.0,
    };
    let worst = all()
        .map(|s| unitarity_defect(&s.scaled(scale)))
        .fold(0.0, f64::max);
    suites.push(suite("unitarity_defect", worst, EXACT_TOL, "|S†S − 1|"));

    let mut worst: f64 = 0.0;
    for (mix, rep) in &reports {
        let (Some(det), Some(w)) = (rep.eta_det, rep.eta_w) else {
            continue;
        };
        worst = worst.max((det - w).abs());
        if !mix {
            let closed = rep.eta_closed.unwrap_or(f64::NAN);
            worst = worst.max((closed - det).abs()).max((closed - w).abs());
        }
    }
    suites.push(suite("route_equivalence", worst, EXACT_TOL, "route spread"));

    let worst = all()
        .map(|s| (probability_budget(&s.r, &s.t) - 1.0).abs())
        .fold(0.0, f64::max);
    suites.push(suite("probability_budget", worst, EXACT_TOL, "|budget − 1|"));

    let mut worst: f64 = 0.0;
    for (_, rep) in &reports {
        let (Some(rho), Some(eta)) = (&rep.rho1, rep.eta()) else {
            continue;
        };
        worst = worst
            .max((rho.purity - (2.0 - eta * eta) / 4.0).abs())
            .max((rho.trace() - 1.0).abs())
            .max(-rho.eigenvalues[0])
            .max(rho.eigenvalues[3] - 1.0);
    }
    suites.push(suite("purity_identity", worst, EXACT_TOL, "purity/trace defect"));

    let worst = reports
        .iter()
        .map(|(_, r)| r.full_state_eta)
        .fold(0.0, f64::max);
    suites.push(suite("full_state_zero", worst, EXACT_TOL, "full-state eta"));

    suites.push(zero_alignment_suite());

    if opts.oracle {
        suites.push(match oracle_worst() {
            Ok(w) => suite("oracle_agreement", w, ORACLE_TOL, "oracle deviation"),
            Err(e) => SuiteResult {
                name: "oracle_agreement",
                passed: false,
                detail: e.to_string(),
            },
        });
    }

    let skipped = reports
        .iter()
        .filter(|(_, r)| r.p_select <= NORM_FLOOR)
        .count();
    if skipped > 0 {
        if let Some(s) = suites.get_mut(1) {
            let _ = write!(s.detail, "; {skipped} draws without post-selected state");
        }
    }
    SelfcheckReport { suites }
}

fn zero_alignment_suite() -> SuiteResult {
    let name = "zero_alignment";
    let chain = DeltaChain::uncoupled(0.01, 0.01).expect("finite");
    match slice_zeros(&chain, 1.0, 0.0, 2.0, 2000) {
        Ok(z) => {
            let n = z.alignment.zeros.len();
            let dist = z.alignment.max_distance();
            let passed = n >= 3
                                && dist <= ZERO_MATCH_TOL
                && z.eta_at_resonances < ETA_ZERO;
            SuiteResult {
                name,
                passed,
                detail: format!(
                    "{n} zeros / {} resonances, max distance {dist:.3e}, max eta at resonance {:.3e}",
                    z.resonances.len(),
                    z.eta_at_resonances
                ),
            }
        }
        Err(e) => SuiteResult {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let opts = SelfcheckOptions {
            draws: 50,
            ..Default::default()
        };
        let rep = run_selfcheck(&opts);
        assert!(rep.passed(), "{}", rep.render());
        assert!(rep.render().ends_with("PASS 6/6 suites\n"));
    }

    #[test]
    fn injected_fault_names_unitarity() {
        let opts = SelfcheckOptions {
            draws: 20,
            fault: Some(Fault::UnitarityScale),
            ..Default::default()
        };
        let rep = run_selfcheck(&opts);
        assert!(!rep.passed());
        assert!(rep.render().contains("FAIL unitarity_defect"));
    }

    #[test]
    fn random_systems_respect_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (c, k1, k2) = random_system(&mut rng, true);
            assert!((0.0..=5.0).contains(&c.u11) && (0.0..=5.0).contains(&c.u22));
            assert!(c.u12.norm() <= 2.0 + 1e-15);
            assert!(k1 > 0.05 && k1 <= 3.0 && k2 > 0.05 && k2 <= 3.0);
        }
    }
}
