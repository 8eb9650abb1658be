//! Post-selected two-electron state and its concurrence.
//!
//! Two electrons enter from the left, one per channel. After scattering the
//! state splits into three pieces: both reflected (`[rσ_y rᵀ]₁₂`), both
//! transmitted (`[tσ_y tᵀ]₁₂`), and one on each side (`rσ_y tᵀ`). Coincidence
//! detection keeps only the last piece. Its amplitude matrix `γ` is built
//! entry by entry as
//!
//! ```text
//! γ = [[r₁₂t₁₁ − r₁₁t₁₂,  r₁₂t₂₁ − r₁₁t₂₂],
//!      [r₂₂t₁₁ − r₂₁t₁₂,  r₂₂t₂₁ − r₂₁t₂₂]]
//! ```
//!
//! which equals `−i · rσ_y tᵀ`. Every observable here depends on `|det γ|`,
//! `γγ†` or `γᵀγ̄` only, so that global phase is invisible.
//!
//! Mode basis for 4×4 objects is fixed as `(L1, L2, R1, R2)`: `L_i` is an
//! outgoing electron on the left in channel `i` (`a†_out,i`), `R_i` one on the
//! right (`b†_out,i`).

use crate::chanmath::{hermitian_eigenvalues, Mat2C, C64, ZERO};
use crate::error::{Error, Result};
use crate::scattering::{unitarity_defect, ScattererS};

/// `Tr γγ†` at or below this is treated as "no post-selected state".
pub const NORM_FLOOR: f64 = 1e-280;

/// Allowed deviation of `Tr WW†` from 1/2 before a W matrix is rejected.
pub const W_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    L1 = 0,
    L2 = 1,
    R1 = 2,
    R2 = 3,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::L1, Mode::L2, Mode::R1, Mode::R2];

    pub fn label(self) -> &'static str {
        match self {
            Mode::L1 => "L1",
            Mode::L2 => "L2",
            Mode::R1 => "R1",
            Mode::R2 => "R2",
        }
    }
}

/// Amplitude matrix of the one-left/one-right component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaState {
    pub gamma: Mat2C,
    /// `Tr γγ†`.
    pub norm: f64,
    pub r: Mat2C,
    pub t: Mat2C,
}

impl GammaState {
    pub fn exists(&self) -> bool {
        self.norm > NORM_FLOOR
    }

    fn require(&self) -> Result<()> {
        if self.exists() {
            Ok(())
        } else {
            Err(Error::NoPostSelectedState(self.norm))
        }
    }
}

pub fn gamma_of(r: &Mat2C, t: &Mat2C) -> GammaState {
    let g = |i: usize, j: usize| r[(i, 1)] * t[(j, 0)] - r[(i, 0)] * t[(j, 1)];
    let gamma = Mat2C::new(g(0, 0), g(0, 1), g(1, 0), g(1, 1));
    GammaState {
        gamma,
        norm: gamma.frob_sq(),
        r: *r,
        t: *t,
    }
}

/// Probability of the coincidence outcome, `Tr γγ†`.
pub fn postselect_probability(g: &GammaState) -> f64 {
    g.norm
}

/// `[rσ_y rᵀ]₁₂` and `[tσ_y tᵀ]₁₂`: amplitudes for both electrons reflected
/// and both transmitted.
pub fn same_side_amplitudes(r: &Mat2C, t: &Mat2C) -> (C64, C64) {
    let sy = Mat2C::sigma_y();
    ((*r * sy * r.transpose())[(0, 1)], (*t * sy * t.transpose())[(0, 1)])
}

/// `Tr γγ† + |[rσ_y rᵀ]₁₂|² + |[tσ_y tᵀ]₁₂|²`; equals 1 for unitary S.
pub fn probability_budget(r: &Mat2C, t: &Mat2C) -> f64 {
    let (rr, tt) = same_side_amplitudes(r, t);
    gamma_of(r, t).norm + rr.norm_sqr() + tt.norm_sqr()
}

/// Closed form for uncoupled channels:
/// `η = 2|r₂₂||t₁₁||r₁₁||t₂₂| / (|r₂₂|²|t₁₁|² + |r₁₁|²|t₂₂|²)`, 0 when the
/// denominator vanishes.
pub fn concurrence_closed(r11: C64, r22: C64, t11: C64, t22: C64) -> f64 {
    let a = r22.norm() * t11.norm();
    let b = r11.norm() * t22.norm();
    let denom = a * a + b * b;
    if denom == 0.0 {
        0.0
    } else {
        2.0 * a * b / denom
    }
}

/// `η = 2|det γ| / Tr γγ†`.
pub fn concurrence_det(g: &GammaState) -> Result<f64> {
    g.require()?;
    Ok(2.0 * g.gamma.det().norm() / g.norm)
}

/// Antisymmetric two-fermion coefficient matrix over `(L1, L2, R1, R2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WMatrix(pub [[C64; 4]; 4]);

impl WMatrix {
    /// Builds `[[ll·ε, lr], [−lrᵀ, rr·ε]] · scale`, `ε` the 2×2 antisymmetric unit.
    fn from_blocks(ll: C64, rr: C64, lr: &Mat2C, scale: f64) -> Self {
        let mut w = [[ZERO; 4]; 4];
        w[0][1] = ll * scale;
        w[1][0] = -w[0][1];
        w[2][3] = rr * scale;
        w[3][2] = -w[2][3];
        for i in 0..2 {
            for j in 0..2 {
                w[i][j + 2] = lr[(i, j)] * scale;
                w[j + 2][i] = -w[i][j + 2];
            }
        }
        WMatrix(w)
    }

    /// Accepts an explicit matrix if it is antisymmetric to 1e-14.
    pub fn try_from_entries(entries: [[C64; 4]; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                if (entries[i][j] + entries[j][i]).norm() > 1e-14 {
                    return Err(Error::InvalidInput(format!(
                        "W not antisymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(WMatrix(entries))
    }

    pub fn get(&self, a: Mode, b: Mode) -> C64 {
        self.0[a as usize][b as usize]
    }

    /// `Tr WW†`.
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn nonzero_upper_entries(&self) -> usize {
        (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .filter(|&(i, j)| self.0[i][j] != ZERO)
            .count()
    }

    fn is_post_selected(&self) -> bool {
        self.0[0][1].norm() <= 1e-15 && self.0[2][3].norm() <= 1e-15
    }
}

/// W of the post-selected state: `[[0, γ], [−γᵀ, 0]] / (2√(Tr γγ†))`.
pub fn w_postselected(g: &GammaState) -> Result<WMatrix> {
    g.require()?;
    Ok(WMatrix::from_blocks(
        ZERO,
        ZERO,
        &g.gamma,
        0.5 / g.norm.sqrt(),
    ))
}

/// W of the complete scattered state, all three components kept.
///
/// The one-left/one-right block is `rσ_y tᵀ` here, not `γ`: the same-side
/// amplitudes `[rσ_y rᵀ]₁₂`, `[tσ_y tᵀ]₁₂` carry the `σ_y` phase, and the
/// blocks must share it for the state to be the scattered input state.
pub fn w_full(r: &Mat2C, t: &Mat2C) -> Result<WMatrix> {
    let (rr, tt) = same_side_amplitudes(r, t);
    let lr = *r * Mat2C::sigma_y() * t.transpose();
    let total = rr.norm_sqr() + tt.norm_sqr() + lr.frob_sq();
    if !(total > NORM_FLOOR) {
        return Err(Error::InvalidInput(
            "scattered state has zero norm".into(),
        ));
    }
    Ok(WMatrix::from_blocks(rr, tt, &lr, 0.5 / total.sqrt()))
}

/// `η = 8|W₁₂W₃₄ + W₁₃W₄₂ + W₁₄W₂₃|` for `Tr WW† = 1/2`.
pub fn concurrence_from_w(w: &WMatrix) -> Result<f64> {
    let defect = (w.norm_sq() - 0.5).abs();
    if !(defect <= W_NORM_TOL) {
        return Err(Error::NotNormalized(defect));
    }
    let m = &w.0;
    let pf = m[0][1] * m[2][3] + m[0][2] * m[3][1] + m[0][3] * m[1][2];
    Ok(8.0 * pf.norm())
}

/// One-particle reduced density matrix `ρ₁ = 2WW†` with its spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensity {
    pub rho: [[C64; 4]; 4],
    /// Ascending.
    pub eigenvalues: [f64; 4],
    /// `Tr ρ₁²`.
    pub purity: f64,
}

impl ReducedDensity {
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.rho[i][i].re).sum()
    }

    pub fn weight(&self, mode: Mode) -> f64 {
        self.rho[mode as usize][mode as usize].re
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        worst
    }
}

/// Partial trace over one electron of a post-selected state.
///
/// For uncoupled channels the weight `|r₂₂t₁₁|²/2Tr γγ†` sits on `R1` and
/// `L2`, and `|r₁₁t₂₂|²/2Tr γγ†` on `R2` and `L1`: when channel 1 is
/// transmitted the channel-2 electron must have been reflected.
pub fn reduced_density(w: &WMatrix) -> Result<ReducedDensity> {
    if !w.is_post_selected() {
        return Err(Error::NotPostSelected);
    }
    let defect = (w.norm_sq() - 0.5).abs();
    if !(defect <= W_NORM_TOL) {
        return Err(Error::NotNormalized(defect));
    }
    let m = &w.0;
    let mut rho = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut z = ZERO;
            for k in 0..4 {
                z += m[i][k] * m[j][k].conj();
            }
            rho[i][j] = 2.0 * z;
        }
    }
    // Same-side blocks of W vanish, so ρ₁ is block diagonal in (L, R).
    let block = |o: usize| {
        Mat2C::new(rho[o][o], rho[o][o + 1], rho[o + 1][o], rho[o + 1][o + 1])
    };
    let [a, b] = hermitian_eigenvalues(&block(0));
    let [c, d] = hermitian_eigenvalues(&block(2));
    let mut eigenvalues = [a, b, c, d];
    eigenvalues.sort_by(f64::total_cmp);
    let purity = rho.iter().flatten().map(|z| z.norm_sqr()).sum();
    Ok(ReducedDensity {
        rho,
        eigenvalues,
        purity,
    })
}

/// Everything computed for one scattering matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    /// Closed form; `None` with channel mixing or without a post-selected state.
    pub eta_closed: Option<f64>,
    pub eta_det: Option<f64>,
    pub eta_w: Option<f64>,
    pub p_select: f64,
    pub p_both_reflected: f64,
    pub p_both_transmitted: f64,
    pub rho1: Option<ReducedDensity>,
    pub purity: Option<f64>,
    pub full_state_eta: f64,
    pub unitarity_defect: f64,
    pub mixing: bool,
}

impl EntanglementReport {
    pub fn analyze(s: &ScattererS) -> Result<Self> {
        let (r, t) = (&s.r, &s.t);
        let g = gamma_of(r, t);
        let mixing = !(r.is_diagonal() && t.is_diagonal());
        let (rr, tt) = same_side_amplitudes(r, t);
        let full_state_eta = concurrence_from_w(&w_full(r, t)?)?;

        let (eta_closed, eta_det, eta_w, rho1) = if g.exists() {
            let w = w_postselected(&g)?;
            let closed = (!mixing)
                .then(|| concurrence_closed(r[(0, 0)], r[(1, 1)], t[(0, 0)], t[(1, 1)]));
            (
                closed,
                Some(concurrence_det(&g)?),
                Some(concurrence_from_w(&w)?),
                Some(reduced_density(&w)?),
            )
        } else {
            (None, None, None, None)
        };

        Ok(EntanglementReport {
            eta_closed,
            eta_det,
            eta_w,
            p_select: g.norm,
            p_both_reflected: rr.norm_sqr(),
            p_both_transmitted: tt.norm_sqr(),
            purity: rho1.map(|r| r.purity),
            rho1,
            full_state_eta,
            unitarity_defect: unitarity_defect(s),
            mixing,
        })
    }

    /// Preferred concurrence value: the determinant route.
    pub fn eta(&self) -> Option<f64> {
        self.eta_det
    }
}
