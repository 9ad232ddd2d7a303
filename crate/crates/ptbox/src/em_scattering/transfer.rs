//! Transfer and scattering matrices of parity-symmetric slabs.
//!
//! A parity-symmetric slab with `det T = 1` has
//! `T = [[(1 − b²)/d, b], [−b, d]]` and `S = (1/d)[[1, b], [b, 1]]`, whose
//! eigenvalues `z₁,₂ = (1 ± b)/d` are written `z₁ = ρe^{μ}e^{iφ₁}`,
//! `z₂ = ρe^{−μ}e^{iφ₂}`. With `tan((φ₁ − φ₂)/2) = sinh θ` and
//! `φ = φ₂ + (φ₁ − φ₂)/2` this gives the `(ρ, μ, θ, φ)` form used everywhere
//! in this module.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::interface::MediumParams;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Maps `(A_L, B_L)` to `(A_R, B_R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub Matrix2<Complex64>);

impl TransferMatrix {
    #[must_use]
    pub fn new(t11: Complex64, t12: Complex64, t21: Complex64, t22: Complex64) -> Self {
        Self(Matrix2::new(t11, t12, t21, t22))
    }

    #[must_use]
    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    #[must_use]
    pub fn t11(&self) -> Complex64 {
        self.0[(0, 0)]
    }

    #[must_use]
    pub fn t12(&self) -> Complex64 {
        self.0[(0, 1)]
    }

    #[must_use]
    pub fn t21(&self) -> Complex64 {
        self.0[(1, 0)]
    }

    #[must_use]
    pub fn t22(&self) -> Complex64 {
        self.0[(1, 1)]
    }

    #[must_use]
    pub fn det(&self) -> Complex64 {
        self.0.determinant()
    }

    /// `self · rhs`: `rhs` acts first.
    #[must_use]
    pub fn compose(&self, rhs: &Self) -> Self {
        Self(self.0 * rhs.0)
    }

    /// Largest entry of `|σₓ T σₓ − T⁻¹|`.
    #[must_use]
    pub fn parity_deviation(&self) -> f64 {
        let sx = Matrix2::new(ZERO, ONE, ONE, ZERO);
        match self.0.try_inverse() {
            Some(inv) => (sx * self.0 * sx - inv).iter().map(|z| z.norm()).fold(0.0, f64::max),
            None => f64::INFINITY,
        }
    }

    /// Largest entry of `|T T* − I|`.
    #[must_use]
    pub fn pt_deviation(&self) -> f64 {
        (self.0 * self.0.conjugate() - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `(ρ, μ, θ, φ)`: mean absorbance, asymmetry, penetrability and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabParams {
    pub rho: f64,
    pub mu: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SlabParams {
    pub fn new(rho: f64, mu: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        if !(mu.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidParameter("slab parameters must be finite".into()));
        }
        Ok(Self { rho, mu, theta, phi })
    }

    /// `(z₁, z₂)`, the eigenvalues of the slab S matrix.
    #[must_use]
    pub fn s_eigenvalues(&self) -> (Complex64, Complex64) {
        let psi = self.theta.sinh().atan();
        (
            Complex64::from_polar(self.rho * self.mu.exp(), self.phi + psi),
            Complex64::from_polar(self.rho * (-self.mu).exp(), self.phi - psi),
        )
    }
}

/// Amplitudes of the outgoing waves: `B_L = r_L A_L + t_R B_R`,
/// `A_R = t_L A_L + r_R B_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    pub t_l: Complex64,
    pub t_r: Complex64,
    pub r_l: Complex64,
    pub r_r: Complex64,
}

impl ScatteringMatrix {
    /// `[[t_L, r_R], [r_L, t_R]]`, acting on `(A_L, B_R)` to give `(A_R, B_L)`.
    #[must_use]
    pub fn matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(self.t_l, self.r_r, self.r_l, self.t_r)
    }
}

/// Reduces an angle to `(−π, π]`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    x - 2.0 * PI * ((x - PI) / (2.0 * PI)).ceil()
}

/// The slab matrix
/// `(cosh μ + i sinh μ sinh θ)⁻¹ [[ρ cosh θ e^{iφ}, w], [−w, cosh θ e^{−iφ}/ρ]]`
/// with `w = sinh μ + i cosh μ sinh θ`.
#[must_use]
pub fn transfer_from_params(p: SlabParams) -> TransferMatrix {
    let (ch_t, sh_t) = (p.theta.cosh(), p.theta.sinh());
    let (ch_m, sh_m) = (p.mu.cosh(), p.mu.sinh());
    let pre = 1.0 / Complex64::new(ch_m, sh_m * sh_t);
    let w = Complex64::new(sh_m, ch_m * sh_t);
    TransferMatrix::new(
        pre * p.rho * ch_t * Complex64::from_polar(1.0, p.phi),
        pre * w,
        -pre * w,
        pre * ch_t * Complex64::from_polar(1.0, -p.phi) / p.rho,
    )
}

/// Inverse of [`transfer_from_params`] for a parity-symmetric `T`.
pub fn params_from_transfer(t: &TransferMatrix) -> Result<SlabParams> {
    let deviation = (t.t12() + t.t21()).norm();
    if deviation > 1e-10 * t.t12().norm().max(1.0) {
        return Err(Error::NotParitySymmetric { deviation });
    }
    let (b, d) = (t.t12(), t.t22());
    if d.norm() < 1e-12 {
        return Err(Error::DegenerateD(d.norm()));
    }
    let z1 = (1.0 + b) / d;
    let z2 = (1.0 - b) / d;
    let rho = (z1.norm() * z2.norm()).sqrt();
    let mu = 0.5 * (z1.norm() / z2.norm()).ln();
    let psi = 0.5 * wrap_angle(z1.arg() - z2.arg());
    let theta = psi.tan().asinh();
    let phi = wrap_angle(z2.arg() + psi);
    SlabParams::new(rho, mu, theta, phi)
}

fn vacuum_matrix(x: f64, k: f64) -> Matrix2<Complex64> {
    let e = Complex64::from_polar(1.0, k * x);
    let ei = e.conj();
    Matrix2::new(e, ei, e, -ei)
}

fn medium_matrix(x: f64, k: f64, medium: &MediumParams) -> Matrix2<Complex64> {
    let eta = medium.impedance_ratio();
    let e = (I * medium.n * k * x).exp();
    let ei = 1.0 / e;
    Matrix2::new(e, ei, eta * e, -eta * ei)
}

/// Slab of `medium` occupying `[−d/2, d/2]`, matching `E` and `H`
/// (`∝ (n/μ_r) ∂ₓE`) at both faces.
pub fn physical_slab_transfer(medium: MediumParams, thickness: f64, k: f64) -> Result<TransferMatrix> {
    if !(thickness > 0.0 && k > 0.0) {
        return Err(Error::InvalidParameter(format!("need d > 0 and k > 0, got d = {thickness}, k = {k}")));
    }
    let eta = medium.impedance_ratio();
    if eta.norm() < 1e-12 {
        return Err(Error::PoleAtInterface { denominator: eta.norm() });
    }
    let h = 0.5 * thickness;
    let exit = vacuum_matrix(h, k).try_inverse().expect("vacuum matching matrix is invertible");
    let entry = medium_matrix(-h, k, &medium).try_inverse().ok_or(Error::PoleAtInterface { denominator: 0.0 })?;
    Ok(TransferMatrix(exit * medium_matrix(h, k, &medium) * entry * vacuum_matrix(-h, k)))
}

/// `σₓ T* σₓ`.
#[must_use]
pub fn time_reverse(t: &TransferMatrix) -> TransferMatrix {
    TransferMatrix::new(t.t22().conj(), t.t21().conj(), t.t12().conj(), t.t11().conj())
}

/// `U(δ) T U†(δ)` with `U(δ) = diag(e^{−ikδ}, e^{ikδ})`: the scatterer moved
/// by `δ`.
#[must_use]
pub fn shift(t: &TransferMatrix, delta: f64, k: f64) -> TransferMatrix {
    let u = Complex64::from_polar(1.0, -k * delta);
    let uu = u * u;
    TransferMatrix::new(t.t11(), t.t12() * uu, t.t21() / uu, t.t22())
}

/// S matrix by amplitude bookkeeping: `t_L = det T/t₂₂`, `r_R = t₁₂/t₂₂`,
/// `r_L = −t₂₁/t₂₂`, `t_R = 1/t₂₂`.
pub fn to_smatrix(t: &TransferMatrix) -> Result<ScatteringMatrix> {
    let d = t.t22();
    if d.norm() <= 1e-12 {
        return Err(Error::SMatrixPole(d.norm()));
    }
    Ok(ScatteringMatrix { t_l: t.det() / d, t_r: 1.0 / d, r_l: -t.t21() / d, r_r: t.t12() / d })
}
