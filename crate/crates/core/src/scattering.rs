//! Single- and double-delta scattering matrices for a two-channel wire.
//!
//! Amplitudes are flux normalized (plane waves scaled by `1/√k`), so the
//! block matrix `[[r, t'], [t, r']]` is unitary. Every scatterer is
//! referenced to the plane `x = 0` on both leads: a delta sitting at `x0`
//! picks up `r → P r P`, `r' → P̄ r' P̄`, `t → P̄ t P`, `t' → P t' P̄` with
//! `P = diag(e^{ik₁x0}, e^{ik₂x0})`. With the pair at `∓d/2` this gives the
//! `e^{−ikd}` and `e^{2ikd}` factors of the closed-form double-delta
//! amplitudes exactly, phase included.

use crate::chanmath::{to_internal, Mat2C, C64, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Threshold on `|det(1 − r'_a r_b)|` below which composition is refused.
pub const COMPOSE_SINGULAR: f64 = 1e-14;

/// Reflection and transmission amplitude of one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub r: C64,
    pub t: C64,
}

impl AmplitudePair {
    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }
}

/// Two identical delta barriers at `∓d/2` coupling two channels through the
/// Hermitian matrix `u`. Couplings are stored in `2π/d` units; `d` is the
/// length unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaChain {
    pub u11: f64,
    pub u22: f64,
    /// Off-diagonal coupling; `u21 = conj(u12)`.
    pub u12: C64,
}

impl DeltaChain {
    pub const D: f64 = 1.0;

    pub fn new(u11: f64, u22: f64, u12: C64) -> Result<Self> {
        if !u11.is_finite() || !u22.is_finite() || !u12.re.is_finite() || !u12.im.is_finite() {
            return Err(Error::InvalidInput("couplings must be finite".into()));
        }
        Ok(DeltaChain { u11, u22, u12 })
    }

    pub fn uncoupled(u11: f64, u22: f64) -> Result<Self> {
        Self::new(u11, u22, ZERO)
    }

    pub fn is_mixing(&self) -> bool {
        self.u12 != ZERO
    }

    /// Hermitian coupling matrix in internal units.
    pub fn coupling(&self) -> Mat2C {
        Mat2C::new(
            C64::from(to_internal(self.u11)),
            self.u12 * to_internal(1.0),
            self.u12.conj() * to_internal(1.0),
            C64::from(to_internal(self.u22)),
        )
    }

    /// Composed S-matrix at channel wavenumbers given in `2π/d` units.
    pub fn smatrix(&self, k1_user: f64, k2_user: f64) -> Result<ScattererS> {
        let (k1, k2) = (to_internal(k1_user), to_internal(k2_user));
        let u = self.coupling();
        let half = 0.5 * Self::D;
        let left = delta_smatrix(&u, k1, k2, -half)?;
        let right = delta_smatrix(&u, k1, k2, half)?;
        compose(&left, &right)
    }

    /// Closed-form amplitudes of channel `j ∈ {1, 2}` at `k_user`; ignores `u12`.
    pub fn closed_form(&self, channel: u32, k_user: f64) -> Result<AmplitudePair> {
        let u = match channel {
            1 => self.u11,
            2 => self.u22,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "channel must be 1 or 2, got {channel}"
                )))
            }
        };
        double_delta_closed_form(to_internal(u), to_internal(k_user), Self::D)
    }
}

/// Full two-lead S-matrix: `(a_out, b_out) = [[r, t'], [t, r']] (a_in, b_in)`,
/// `a` the left lead, `b` the right lead. `k1`, `k2` are internal units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScattererS {
    pub r: Mat2C,
    pub t: Mat2C,
    pub rp: Mat2C,
    pub tp: Mat2C,
    pub k1: f64,
    pub k2: f64,
}

impl ScattererS {
    /// 4×4 block form over (left ch1, left ch2, right ch1, right ch2).
    pub fn block(&self) -> [[C64; 4]; 4] {
        let mut s = [[ZERO; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                s[i][j] = self.r[(i, j)];
                s[i][j + 2] = self.tp[(i, j)];
                s[i + 2][j] = self.t[(i, j)];
                s[i + 2][j + 2] = self.rp[(i, j)];
            }
        }
        s
    }

    /// Every block multiplied by `factor`. Only useful for breaking unitarity
    /// on purpose.
    pub fn scaled(&self, factor: f64) -> Self {
        let f = C64::from(factor);
        ScattererS {
            r: self.r.scale(f),
            t: self.t.scale(f),
            rp: self.rp.scale(f),
            tp: self.tp.scale(f),
            ..*self
        }
    }

    /// Largest violation of `t' = tᵀ`, `r = rᵀ`, `r' = r'ᵀ`.
    pub fn symmetry_defect(&self) -> f64 {
        self.tp
            .max_abs_diff(&self.t.transpose())
            .max(self.r.max_abs_diff(&self.r.transpose()))
            .max(self.rp.max_abs_diff(&self.rp.transpose()))
    }

    fn same_wavenumbers(&self, other: &Self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        close(self.k1, other.k1) && close(self.k2, other.k2)
    }
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveWavenumber(k))
    }
}

/// Single delta `ψ'' + k²ψ = u δ(x) ψ`:
/// `r = (u/2ik)/(1 − u/2ik)`, `t = 1/(1 − u/2ik)`.
pub fn delta_amplitudes(u: f64, k: f64) -> Result<AmplitudePair> {
    check_k(k)?;
    let c = C64::from(u) / (2.0 * I * k);
    let denom = ONE - c;
    Ok(AmplitudePair {
        r: c / denom,
        t: denom.inv(),
    })
}

/// Delta barrier at `x0` with Hermitian channel coupling `u` (internal units).
///
/// At the local plane `t = [1 + (i/2) K^{−1/2} u K^{−1/2}]^{−1}`, `r = t − 1`,
/// `K = diag(k1, k2)`; mirror symmetry gives `r' = r`, `t' = t`.
pub fn delta_smatrix(u: &Mat2C, k1: f64, k2: f64, x0: f64) -> Result<ScattererS> {
    check_k(k1)?;
    check_k(k2)?;
    if u.max_abs_diff(&u.adjoint()) > 1e-12 * u.frob_sq().sqrt().max(1.0) {
        return Err(Error::InvalidInput("coupling matrix must be Hermitian".into()));
    }
    let ks = [k1, k2];
    let mut a = Mat2C::zero();
    for m in 0..2 {
        for n in 0..2 {
            a[(m, n)] = u[(m, n)] / (ks[m] * ks[n]).sqrt();
        }
    }
    // 1 + iA/2 with A Hermitian has eigenvalues 1 + iλ/2, never singular.
    let t0 = (Mat2C::identity() + a.scale(0.5 * I)).inv()?;
    let r0 = t0 - Mat2C::identity();
    let p = Mat2C::diag(C64::from_polar(1.0, k1 * x0), C64::from_polar(1.0, k2 * x0));
    let pc = p.conj();
    Ok(ScattererS {
        r: p * r0 * p,
        t: pc * t0 * p,
        rp: pc * r0 * pc,
        tp: p * t0 * pc,
        k1,
        k2,
    })
}

/// Phase-only propagation over length `len` (may be negative, which moves a
/// reference plane backwards).
pub(crate) fn propagator(k1: f64, k2: f64, len: f64) -> ScattererS {
    let phase = Mat2C::diag(C64::from_polar(1.0, k1 * len), C64::from_polar(1.0, k2 * len));
    ScattererS {
        r: Mat2C::zero(),
        t: phase,
        rp: Mat2C::zero(),
        tp: phase,
        k1,
        k2,
    }
}

/// Free propagation over a lead segment of length `len ≥ 0`.
pub fn free_segment(k1: f64, k2: f64, len: f64) -> Result<ScattererS> {
    if !(len >= 0.0) || !len.is_finite() {
        return Err(Error::InvalidInput(format!(
            "segment length must be non-negative, got {len}"
        )));
    }
    Ok(propagator(k1, k2, len))
}

/// Star product of `sa` (left) followed by `sb` (right).
pub fn compose(sa: &ScattererS, sb: &ScattererS) -> Result<ScattererS> {
    if !sa.same_wavenumbers(sb) {
        return Err(Error::WavenumberMismatch);
    }
    let id = Mat2C::identity();
    let inner_left = id - sa.rp * sb.r;
    let inner_right = id - sb.r * sa.rp;
    let det = inner_left.det().norm();
    if det < COMPOSE_SINGULAR {
        return Err(Error::ResonantSingularity(det));
    }
    let inv_left = inner_left.inv()?;
    let inv_right = inner_right.inv()?;
    Ok(ScattererS {
        r: sa.r + sa.tp * sb.r * inv_left * sa.t,
        t: sb.t * inv_left * sa.t,
        rp: sb.rp + sb.t * sa.rp * inv_right * sb.tp,
        tp: sa.tp * inv_right * sb.tp,
        k1: sa.k1,
        k2: sa.k2,
    })
}

/// Closed-form amplitudes of one channel through two deltas of strength `u`
/// at `∓d/2`:
/// `r = r₁e^{−ikd}(1 + t₁²e^{2ikd}/(1 − r₁²e^{2ikd}))`, `t = t₁²/(1 − r₁²e^{2ikd})`.
pub fn double_delta_closed_form(u: f64, k: f64, d: f64) -> Result<AmplitudePair> {
    if !(d > 0.0) {
        return Err(Error::InvalidInput(format!(
            "separation must be positive, got {d}"
        )));
    }
    let single = delta_amplitudes(u, k)?;
    let (r1, t1) = (single.r, single.t);
    let round_trip = C64::from_polar(1.0, 2.0 * k * d);
    let denom = ONE - r1 * r1 * round_trip;
    Ok(AmplitudePair {
        r: r1 * C64::from_polar(1.0, -k * d) * (ONE + t1 * t1 * round_trip / denom),
        t: t1 * t1 / denom,
    })
}

/// Frobenius norm of `S†S − 1` for the 4×4 block matrix.
pub fn unitarity_defect(s: &ScattererS) -> f64 {
    let m = s.block();
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let mut z = ZERO;
            for row in m.iter() {
                z += row[i].conj() * row[j];
            }
            if i == j {
                z -= ONE;
            }
            acc += z.norm_sqr();
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn free_delta_is_transparent() {
        for k in [0.1, 1.0, 30.0] {
            let a = delta_amplitudes(0.0, k).unwrap();
            assert_eq!(a.r, ZERO);
            assert_eq!(a.t, ONE);
        }
    }

    #[test]
    fn delta_half_transmission_at_u_equals_2k() {
        let k = 3.7;
        let a = delta_amplitudes(2.0 * k, k).unwrap();
        assert_relative_eq!(a.transmission(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(a.reflection(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn opaque_limit_monotone() {
        let k = 2.0;
        let mut prev = 1.0;
        for u in [0.0, 1.0, 10.0, 100.0, 1e4, 1e8] {
            let t = delta_amplitudes(u, k).unwrap().t.norm();
            assert!(t <= prev);
            prev = t;
        }
        assert!(prev < 1e-7);
    }

    #[test]
    fn nonpositive_k_rejected() {
        assert!(matches!(
            delta_amplitudes(1.0, 0.0),
            Err(Error::NonPositiveWavenumber(_))
        ));
        assert!(delta_amplitudes(1.0, -1.0).is_err());
        assert!(delta_smatrix(&Mat2C::zero(), 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn small_k_limits() {
        let a = delta_amplitudes(1.0, 1e-9).unwrap();
        assert!((a.r + ONE).norm() < 1e-8);
        assert!(a.t.norm() < 1e-8);
    }

    #[test]
    fn uncoupled_matrix_delta_matches_scalar() {
        let u = Mat2C::real_diag(0.8, 2.5);
        let (k1, k2) = (1.3, 0.6);
        let s = delta_smatrix(&u, k1, k2, 0.0).unwrap();
        let a1 = delta_amplitudes(0.8, k1).unwrap();
        let a2 = delta_amplitudes(2.5, k2).unwrap();
        assert!(s.r.max_abs_diff(&Mat2C::diag(a1.r, a2.r)) < 1e-15);
        assert!(s.t.max_abs_diff(&Mat2C::diag(a1.t, a2.t)) < 1e-15);
    }

    #[test]
    fn zero_coupling_is_identity_transmission() {
        let s = delta_smatrix(&Mat2C::zero(), 1.0, 2.0, 0.3).unwrap();
        assert_eq!(s.r, Mat2C::zero());
        assert!(s.t.max_abs_diff(&Mat2C::identity()) < 1e-16);
    }

    #[test]
    fn non_hermitian_coupling_rejected() {
        let u = Mat2C::new(ONE, C64::from(0.5), C64::from(0.1), ONE);
        assert!(matches!(
            delta_smatrix(&u, 1.0, 1.0, 0.0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn free_segment_examples() {
        let s = free_segment(PI, PI / 2.0, 0.0).unwrap();
        assert_eq!(s.t, Mat2C::identity());
        let s = free_segment(PI, PI / 2.0, 1.0).unwrap();
        assert!((s.t[(0, 0)] + ONE).norm() < 1e-15);
        assert!((s.t[(1, 1)] - I).norm() < 1e-15);
        assert_eq!(unitarity_defect(&s), 0.0);
        assert!(free_segment(1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn compose_with_empty_segment_is_identity_op() {
        let chain = DeltaChain::new(0.3, 0.7, C64::new(0.2, -0.1)).unwrap();
        let s = chain.smatrix(0.8, 0.55).unwrap();
        let id = free_segment(s.k1, s.k2, 0.0).unwrap();
        for c in [compose(&s, &id).unwrap(), compose(&id, &s).unwrap()] {
            assert!(c.r.max_abs_diff(&s.r) < 1e-15);
            assert!(c.t.max_abs_diff(&s.t) < 1e-15);
            assert!(c.rp.max_abs_diff(&s.rp) < 1e-15);
            assert!(c.tp.max_abs_diff(&s.tp) < 1e-15);
        }
    }

    #[test]
    fn transparent_pair_composes_to_pure_phase() {
        let s = DeltaChain::uncoupled(0.0, 0.0).unwrap().smatrix(0.4, 1.1).unwrap();
        assert_eq!(s.r.frob_sq(), 0.0);
        assert_relative_eq!(s.t[(0, 0)].norm(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.t[(1, 1)].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn compose_rejects_mismatched_wavenumbers() {
        let a = free_segment(1.0, 2.0, 0.5).unwrap();
        let b = free_segment(1.0, 2.5, 0.5).unwrap();
        assert_eq!(compose(&a, &b), Err(Error::WavenumberMismatch));
    }

    #[test]
    fn composed_pair_matches_closed_form_with_phase() {
        let chain = DeltaChain::uncoupled(0.37, 1.9).unwrap();
        let (k1, k2) = (0.83, 2.4);
        let s = chain.smatrix(k1, k2).unwrap();
        let c1 = chain.closed_form(1, k1).unwrap();
        let c2 = chain.closed_form(2, k2).unwrap();
        assert!(s.r.max_abs_diff(&Mat2C::diag(c1.r, c2.r)) < 1e-13);
        assert!(s.t.max_abs_diff(&Mat2C::diag(c1.t, c2.t)) < 1e-13);
    }

    #[test]
    fn local_deltas_with_free_gap_match_positioned_route() {
        // Route B: deltas at their local planes, a free gap of length d, then
        // both lead planes moved from ∓d/2 back to the origin.
        let chain = DeltaChain::new(0.9, 0.4, C64::new(0.3, 0.2)).unwrap();
        let s = chain.smatrix(0.71, 1.33).unwrap();
        let u = chain.coupling();
        let local = delta_smatrix(&u, s.k1, s.k2, 0.0).unwrap();
        let gap = free_segment(s.k1, s.k2, DeltaChain::D).unwrap();
        let back = propagator(s.k1, s.k2, -0.5 * DeltaChain::D);
        let mut b = compose(&back, &local).unwrap();
        for next in [&gap, &local, &back] {
            b = compose(&b, next).unwrap();
        }
        assert!(b.r.max_abs_diff(&s.r) < 1e-13);
        assert!(b.t.max_abs_diff(&s.t) < 1e-13);
        assert!(b.rp.max_abs_diff(&s.rp) < 1e-13);
        assert!(b.tp.max_abs_diff(&s.tp) < 1e-13);
    }

    #[test]
    fn closed_form_examples() {
        let a = double_delta_closed_form(0.0, 5.0, 1.0).unwrap();
        assert_eq!(a.r, ZERO);
        assert_relative_eq!(a.t.norm(), 1.0, epsilon = 1e-15);
        // Between resonances (k = 1.0 in 2π/d units) the pair reflects. The
        // reference value comes from a 40-digit transfer-matrix evaluation.
        let a = double_delta_closed_form(to_internal(0.01), to_internal(1.0), 1.0).unwrap();
        assert_relative_eq!(a.transmission(), 0.999_900_009_999_000_1, epsilon = 1e-14);
        assert!(a.transmission() < 1.0 - 1e-5);
        assert!(double_delta_closed_form(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_high_precision_reference_amplitudes() {
        let a = double_delta_closed_form(to_internal(0.01), to_internal(1.0), 1.0).unwrap();
        let r_ref = C64::new(-0.000_099_990_000_999_900_01, -0.009_999_000_099_990_001);
        let t_ref = C64::new(0.999_900_009_999_000_1, -0.009_999_000_099_990_001);
        assert!((a.r - r_ref).norm() < 1e-14);
        assert!((a.t - t_ref).norm() < 1e-14);
    }

    #[test]
    fn scaled_matrix_has_large_defect() {
        let s = DeltaChain::new(1.0, 2.0, C64::new(0.5, 0.5))
            .unwrap()
            .smatrix(0.5, 0.9)
            .unwrap();
        assert!(unitarity_defect(&s) < 1e-12);
        assert!(unitarity_defect(&s.scaled(1.1)) > 0.4);
    }

    #[test]
    fn real_mixing_gives_symmetric_s() {
        let s = DeltaChain::new(0.5, 1.5, C64::from(0.7))
            .unwrap()
            .smatrix(0.9, 0.45)
            .unwrap();
        assert!(s.symmetry_defect() < 1e-12);
    }
}
