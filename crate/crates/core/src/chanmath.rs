//! Complex 2×2 algebra and quasi-1D channel kinematics.
//!
//! Lengths are measured in units of the barrier separation `d`, so internally
//! `d = 1`. Wavenumbers and coupling strengths that cross the user boundary
//! (CLI, CSV, resonance tables) are expressed in units of `2π/d`; use
//! [`to_internal`] / [`to_user`] to move between the two.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative guard for [`Mat2C::inv`]: singular when `|det| < SINGULAR_REL * frob_sq`.
pub const SINGULAR_REL: f64 = 1e-14;

/// Size of one user unit (`2π/d`) in internal units, with `d = 1`.
pub const USER_UNIT: f64 = 2.0 * PI;

/// Converts a wavenumber or coupling from `2π/d` units to internal units.
#[inline]
pub fn to_internal(x_user: f64) -> f64 {
    x_user * USER_UNIT
}

/// Converts a wavenumber or coupling from internal units to `2π/d` units.
#[inline]
pub fn to_user(x_internal: f64) -> f64 {
    x_internal / USER_UNIT
}

/// A 2×2 complex matrix, stored row-major. Indices are zero-based: `m[(0, 1)]`
/// is the physicist's `m₁₂`.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2C(pub [[C64; 2]; 2]);

impl Mat2C {
    pub const fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Mat2C([[a11, a12], [a21, a22]])
    }

    pub const fn zero() -> Self {
        Mat2C([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2C([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn diag(a: C64, b: C64) -> Self {
        Mat2C([[a, ZERO], [ZERO, b]])
    }

    pub fn real_diag(a: f64, b: f64) -> Self {
        Self::diag(C64::from(a), C64::from(b))
    }

    /// Pauli `σ_y = [[0, −i], [i, 0]]`.
    pub const fn sigma_y() -> Self {
        Mat2C([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]])
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2C([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    /// `Tr(M M†)`, the squared Frobenius norm.
    pub fn frob_sq(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let m = &self.0;
        Mat2C([[f(m[0][0]), f(m[0][1])], [f(m[1][0]), f(m[1][1])]])
    }

    pub fn is_diagonal(&self) -> bool {
        self.0[0][1] == ZERO && self.0[1][0] == ZERO
    }

    /// Inverse via the adjugate. Fails when `|det| < 1e-14 · frob_sq`.
    pub fn inv(&self) -> Result<Self> {
        let det = self.det();
        let tolerance = SINGULAR_REL * self.frob_sq();
        if !(det.norm() >= tolerance) || det == ZERO {
            return Err(Error::SingularMatrix {
                det_abs: det.norm(),
                tolerance,
            });
        }
        let m = &self.0;
        let inv_det = det.inv();
        Ok(Mat2C([
            [m[1][1] * inv_det, -m[0][1] * inv_det],
            [-m[1][0] * inv_det, m[0][0] * inv_det],
        ]))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn mat2_det(m: &Mat2C) -> C64 {
    m.det()
}

pub fn mat2_mul(a: &Mat2C, b: &Mat2C) -> Mat2C {
    *a * *b
}

pub fn mat2_inv(m: &Mat2C) -> Result<Mat2C> {
    m.inv()
}

pub fn frob_sq(m: &Mat2C) -> f64 {
    m.frob_sq()
}

impl Index<(usize, usize)> for Mat2C {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat2C {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, rhs: Mat2C) -> Mat2C {
        let (a, b) = (&self.0, &rhs.0);
        Mat2C([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<[C64; 2]> for Mat2C {
    type Output = [C64; 2];
    fn mul(self, v: [C64; 2]) -> [C64; 2] {
        let a = &self.0;
        [
            a[0][0] * v[0] + a[0][1] * v[1],
            a[1][0] * v[0] + a[1][1] * v[1],
        ]
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, rhs: Mat2C) -> Mat2C {
        let (a, b) = (&self.0, &rhs.0);
        Mat2C([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, rhs: Mat2C) -> Mat2C {
        self + (-rhs)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        self.map(|z| -z)
    }
}

impl fmt::Debug for Mat2C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// Eigenvalues of a 2×2 Hermitian matrix, ascending. Only the upper triangle
/// and the real part of the diagonal are read.
pub fn hermitian_eigenvalues(m: &Mat2C) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - half_gap, mean + half_gap]
}

/// `K_⊥,n = nπ/w`.
pub fn transverse_wavenumber(n: u32, w: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("channel index must be >= 1".into()));
    }
    if !(w > 0.0) {
        return Err(Error::InvalidInput(format!(
            "wire width must be positive, got {w}"
        )));
    }
    Ok(n as f64 * PI / w)
}

/// Longitudinal wavenumber `k_n = √(k² − K_⊥,n²)` of an open channel.
pub fn longitudinal_k(k_total: f64, n: u32, w: f64) -> Result<f64> {
    let cutoff = transverse_wavenumber(n, w)?;
    let k_sq = k_total * k_total;
    let cutoff_sq = cutoff * cutoff;
    if !(k_sq > cutoff_sq) {
        return Err(Error::ChannelClosed {
            channel: n,
            k_sq,
            cutoff_sq,
        });
    }
    Ok((k_sq - cutoff_sq).sqrt())
}

/// Wire geometry: width `w` and barrier separation `d`, both in the same
/// length unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSetup {
    pub w: f64,
    pub d: f64,
}

impl ChannelSetup {
    pub fn new(w: f64, d: f64) -> Result<Self> {
        if !(w > 0.0) || !(d > 0.0) {
            return Err(Error::InvalidInput(format!(
                "wire width and separation must be positive (w={w}, d={d})"
            )));
        }
        Ok(ChannelSetup { w, d })
    }

    pub fn is_open(&self, k_total: f64, n: u32) -> bool {
        longitudinal_k(k_total, n, self.w).is_ok()
    }

    /// Longitudinal wavenumbers `(k₁, k₂)` at total wavenumber `k`; both
    /// channels must be open.
    pub fn channel_wavenumbers(&self, k_total: f64) -> Result<(f64, f64)> {
        Ok((
            longitudinal_k(k_total, 1, self.w)?,
            longitudinal_k(k_total, 2, self.w)?,
        ))
    }

    /// Total wavenumber for which channel `n` carries longitudinal wavenumber `k_n`.
    pub fn total_k(&self, k_n: f64, n: u32) -> Result<f64> {
        let cutoff = transverse_wavenumber(n, self.w)?;
        Ok((k_n * k_n + cutoff * cutoff).sqrt())
    }
}
