//! Finite-difference check of the analytic scattering matrices.
//!
//! The two delta barriers are replaced by unit-area Gaussians of width
//! `sigma` and the coupled channel equations
//!
//! ```text
//! ψ_n'' + k_n² ψ_n = Σ_m u_nm v(x) ψ_m,   v(x) = g(x + d/2) + g(x − d/2)
//! ```
//!
//! are integrated with fixed-step RK4 across each Gaussian. Outside the
//! Gaussians (beyond 12σ, where `g < 1e-31`) the solution is a plane wave
//! and is carried across exactly. Integration starts in the right lead from
//! a purely outgoing wave in each channel and runs leftwards; the left-lead
//! solution is split into incoming and reflected waves from `ψ` and `ψ'`.
//! The potential is mirror symmetric, so `r' = r` and `t' = t`.

use std::f64::consts::PI;

use crate::chanmath::{Mat2C, C64, I, ZERO};
use crate::error::{Error, Result};
use crate::scattering::{unitarity_defect, ScattererS};

/// Maximum amplitude change allowed when the grid spacing is halved.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// Gaussian support kept, in units of `sigma`.
const SUPPORT_SIGMAS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Gaussian width.
    pub sigma: f64,
    pub grid_spacing: f64,
    pub half_length: f64,
    pub d: f64,
    /// Internal units.
    pub k1: f64,
    pub k2: f64,
    /// Hermitian coupling, internal units.
    pub u: Mat2C,
}

impl OracleConfig {
    /// Defaults: `d = 1`, `sigma = 1e-3·d`, spacing `sigma/20`, half-length `2d`.
    pub fn new(u: Mat2C, k1: f64, k2: f64) -> Self {
        let d = 1.0;
        let sigma = 1e-3 * d;
        OracleConfig {
            sigma,
            grid_spacing: sigma / 20.0,
            half_length: 2.0 * d,
            d,
            k1,
            k2,
            u,
        }
    }

    /// Same grid ratio at a different width.
    pub fn with_sigma(&self, sigma: f64) -> Self {
        OracleConfig {
            sigma,
            grid_spacing: self.grid_spacing * sigma / self.sigma,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.k1 > 0.0 && self.k2 > 0.0) {
            return Err(Error::NonPositiveWavenumber(self.k1.min(self.k2)));
        }
        if !(self.sigma > 0.0 && self.d > 0.0) {
            return bad(format!("sigma and d must be positive ({}, {})", self.sigma, self.d));
        }
        if !(self.grid_spacing > 0.0 && self.grid_spacing <= self.sigma / 10.0) {
            return bad(format!(
                "grid spacing {} must be in (0, sigma/10]",
                self.grid_spacing
            ));
        }
        if self.half_length < 1.5 * self.d + SUPPORT_SIGMAS * self.sigma {
            return bad(format!(
                "half-length {} must leave at least d of free lead beyond each barrier",
                self.half_length
            ));
        }
        if self.u.max_abs_diff(&self.u.adjoint()) > 1e-12 * self.u.frob_sq().sqrt().max(1.0) {
            return bad("coupling matrix must be Hermitian".into());
        }
        Ok(())
    }

    fn profile(&self, x: f64) -> f64 {
        let norm = 1.0 / (self.sigma * (2.0 * PI).sqrt());
        let g = |y: f64| (-0.5 * (y / self.sigma).powi(2)).exp();
        norm * (g(x + 0.5 * self.d) + g(x - 0.5 * self.d))
    }
}

/// `(ψ, ψ')` for one solution of the two-channel problem.
#[derive(Debug, Clone, Copy)]
struct State {
    psi: [C64; 2],
    dpsi: [C64; 2],
}

impl State {
    fn axpy(&self, h: f64, k: &State) -> State {
        State {
            psi: [self.psi[0] + k.psi[0] * h, self.psi[1] + k.psi[1] * h],
            dpsi: [self.dpsi[0] + k.dpsi[0] * h, self.dpsi[1] + k.dpsi[1] * h],
        }
    }
}

struct Integrator<'a> {
    cfg: &'a OracleConfig,
    ks: [f64; 2],
}

impl Integrator<'_> {
    fn derivative(&self, x: f64, s: &State) -> State {
        let v = self.cfg.profile(x);
        let coupled = self.cfg.u * s.psi;
        State {
            psi: s.dpsi,
            dpsi: [
                coupled[0] * v - s.psi[0] * self.ks[0] * self.ks[0],
                coupled[1] * v - s.psi[1] * self.ks[1] * self.ks[1],
            ],
        }
    }

    fn rk4(&self, x: f64, s: &State, h: f64) -> State {
        let k1 = self.derivative(x, s);
        let k2 = self.derivative(x + 0.5 * h, &s.axpy(0.5 * h, &k1));
        let k3 = self.derivative(x + 0.5 * h, &s.axpy(0.5 * h, &k2));
        let k4 = self.derivative(x + h, &s.axpy(h, &k3));
        State {
            psi: std::array::from_fn(|n| {
                s.psi[n] + (k1.psi[n] + (k2.psi[n] + k3.psi[n]) * 2.0 + k4.psi[n]) * (h / 6.0)
            }),
            dpsi: std::array::from_fn(|n| {
                s.dpsi[n] + (k1.dpsi[n] + (k2.dpsi[n] + k3.dpsi[n]) * 2.0 + k4.dpsi[n]) * (h / 6.0)
            }),
        }
    }

    /// Exact propagation by `delta` where the potential vanishes.
    fn free(&self, s: &State, delta: f64) -> State {
        let mut out = *s;
        for n in 0..2 {
            let k = self.ks[n];
            let (sin, cos) = (k * delta).sin_cos();
            out.psi[n] = s.psi[n] * cos + s.dpsi[n] * (sin / k);
            out.dpsi[n] = -s.psi[n] * (k * sin) + s.dpsi[n] * cos;
        }
        out
    }

    /// Fixed-step RK4 from `from` to `to` (either direction).
    fn through(&self, s: &State, from: f64, to: f64, spacing: f64) -> State {
        let steps = ((to - from).abs() / spacing).ceil().max(1.0) as usize;
        let h = (to - from) / steps as f64;
        let mut state = *s;
        for i in 0..steps {
            state = self.rk4(from + h * i as f64, &state, h);
        }
        state
    }

    /// Carries a right-lead state at `+L` to `−L`.
    fn sweep_left(&self, start: State, spacing: f64) -> State {
        let cfg = self.cfg;
        let half = 0.5 * cfg.d;
        let reach = SUPPORT_SIGMAS * cfg.sigma;
        // Potential support, right to left; merged if the Gaussians overlap.
        let windows: Vec<(f64, f64)> = if half - reach <= -half + reach {
            vec![(half + reach, -half - reach)]
        } else {
            vec![(half + reach, half - reach), (-half + reach, -half - reach)]
        };
        let mut x = cfg.half_length;
        let mut state = start;
        for (hi, lo) in windows {
            state = self.free(&state, hi - x);
            state = self.through(&state, hi, lo, spacing);
            x = lo;
        }
        self.free(&state, -cfg.half_length - x)
    }
}

fn scatter_once(cfg: &OracleConfig, spacing: f64) -> Result<ScattererS> {
    let integ = Integrator {
        cfg,
        ks: [cfg.k1, cfg.k2],
    };
    let big_l = cfg.half_length;
    let mut incoming = Mat2C::zero();
    let mut reflected = Mat2C::zero();
    for c in 0..2 {
        let mut start = State {
            psi: [ZERO; 2],
            dpsi: [ZERO; 2],
        };
        let k = integ.ks[c];
        start.psi[c] = C64::from_polar(1.0, k * big_l) / k.sqrt();
        start.dpsi[c] = I * k * start.psi[c];
        let end = integ.sweep_left(start, spacing);
        for n in 0..2 {
            let k = integ.ks[n];
            let x = -big_l;
            let slope = end.dpsi[n] / (I * k);
            incoming[(n, c)] = C64::from_polar(0.5 * k.sqrt(), -k * x) * (end.psi[n] + slope);
            reflected[(n, c)] = C64::from_polar(0.5 * k.sqrt(), k * x) * (end.psi[n] - slope);
        }
    }
    let t = incoming.inv()?;
    let r = reflected * t;
    Ok(ScattererS {
        r,
        t,
        rp: r,
        tp: t,
        k1: cfg.k1,
        k2: cfg.k2,
    })
}

fn max_amplitude_diff(a: &ScattererS, b: &ScattererS) -> f64 {
    a.r.max_abs_diff(&b.r).max(a.t.max_abs_diff(&b.t))
}

/// Scattering matrix of the Gaussian-regularized pair at width `cfg.sigma`.
///
/// Runs at `grid_spacing` and at half of it; fails with
/// [`Error::NotConverged`] if the two differ by more than
/// [`CONVERGENCE_TOL`]. Returns the finer result.
pub fn fd_scatter(cfg: &OracleConfig) -> Result<ScattererS> {
    cfg.validate()?;
    let coarse = scatter_once(cfg, cfg.grid_spacing)?;
    let fine = scatter_once(cfg, 0.5 * cfg.grid_spacing)?;
    let change = max_amplitude_diff(&coarse, &fine);
    if change > CONVERGENCE_TOL {
        return Err(Error::NotConverged(change));
    }
    Ok(fine)
}

/// Zero-width limit of [`fd_scatter`] by Richardson extrapolation over
/// `sigma`, `sigma/2`, `sigma/4`, removing the `O(σ)` and `O(σ²)` terms.
pub fn fd_scatter_extrapolated(cfg: &OracleConfig) -> Result<ScattererS> {
    let a = fd_scatter(cfg)?;
    let b = fd_scatter(&cfg.with_sigma(0.5 * cfg.sigma))?;
    let c = fd_scatter(&cfg.with_sigma(0.25 * cfg.sigma))?;
    let combine = |x: Mat2C, y: Mat2C, z: Mat2C| {
        (z.scale(C64::from(8.0)) - y.scale(C64::from(6.0)) + x).scale(C64::from(1.0 / 3.0))
    };
    let r = combine(a.r, b.r, c.r);
    let t = combine(a.t, b.t, c.t);
    Ok(ScattererS {
        r,
        t,
        rp: r,
        tp: t,
        ..a
    })
}

/// Oracle result with its own unitarity defect attached.
pub fn fd_scatter_checked(cfg: &OracleConfig) -> Result<(ScattererS, f64)> {
    let s = fd_scatter_extrapolated(cfg)?;
    let defect = unitarity_defect(&s);
    Ok((s, defect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chanmath::to_internal;
    use crate::scattering::DeltaChain;

    #[test]
    fn free_wire_is_transparent() {
        let cfg = OracleConfig::new(Mat2C::zero(), 3.0, 5.0);
        let s = fd_scatter(&cfg).unwrap();
        assert!(s.r.frob_sq().sqrt() < 1e-8);
        assert!((s.t[(0, 0)].norm() - 1.0).abs() < 1e-8);
        assert!((s.t[(1, 1)].norm() - 1.0).abs() < 1e-8);
        // Free propagation referenced to x = 0 on both sides adds no phase.
        assert!(s.t.max_abs_diff(&Mat2C::identity()) < 1e-8);
    }

    #[test]
    fn config_validation() {
        let base = OracleConfig::new(Mat2C::zero(), 1.0, 1.0);
        let coarse = OracleConfig {
            grid_spacing: base.sigma / 5.0,
            ..base
        };
        assert!(fd_scatter(&coarse).is_err());
        let short = OracleConfig {
            half_length: 1.0,
            ..base
        };
        assert!(fd_scatter(&short).is_err());
        let closed = OracleConfig { k2: 0.0, ..base };
        assert!(matches!(
            fd_scatter(&closed),
            Err(Error::NonPositiveWavenumber(_))
        ));
    }

    #[test]
    fn coarse_grid_fails_convergence_check() {
        // k·h ≈ 0.6 inside a wide Gaussian: RK4 is nowhere near converged.
        let u = Mat2C::real_diag(to_internal(3.0), to_internal(3.0));
        let cfg = OracleConfig {
            sigma: 0.05,
            grid_spacing: 0.005,
            half_length: 3.0,
            ..OracleConfig::new(u, to_internal(20.0), to_internal(18.0))
        };
        assert!(matches!(fd_scatter(&cfg), Err(Error::NotConverged(_))));
    }

    #[test]
    fn single_width_run_is_close_and_extrapolation_closer() {
        let chain = DeltaChain::uncoupled(0.01, 0.01).unwrap();
        let exact = chain.smatrix(1.0, 1.0).unwrap();
        let cfg = OracleConfig::new(chain.coupling(), exact.k1, exact.k2);
        let raw = fd_scatter(&cfg).unwrap();
        let extrapolated = fd_scatter_extrapolated(&cfg).unwrap();
        let err_raw = max_amplitude_diff(&raw, &exact);
        let err_ext = max_amplitude_diff(&extrapolated, &exact);
        assert!(err_raw < 1e-4, "{err_raw}");
        assert!(err_ext < err_raw);
        assert!(err_ext < 1e-6, "{err_ext}");
    }
}
