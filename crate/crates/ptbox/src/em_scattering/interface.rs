//! Reflection at a single vacuum/medium interface and cavity quantization.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::roots::{zeros_in_rect, ContourOptions, Rect};
use crate::spectrum::BoxConfig;

/// Refractive index `n` and relative permeability `μ_r` of a medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    pub n: Complex64,
    pub mu_r: Complex64,
}

impl MediumParams {
    pub fn new(n: Complex64, mu_r: Complex64) -> Result<Self> {
        if !(n.is_finite() && mu_r.is_finite()) || mu_r.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("invalid medium n = {n}, mu_r = {mu_r}")));
        }
        Ok(Self { n, mu_r })
    }

    /// `ε_r = n²/μ_r`.
    #[must_use]
    pub fn epsilon_r(&self) -> Complex64 {
        self.n * self.n / self.mu_r
    }

    /// `n/μ_r`, the ratio entering the field matching.
    #[must_use]
    pub fn impedance_ratio(&self) -> Complex64 {
        self.n / self.mu_r
    }

    /// The PT partner `(n*, μ_r*)`.
    #[must_use]
    pub fn conjugate(&self) -> Self {
        Self { n: self.n.conj(), mu_r: self.mu_r.conj() }
    }
}

/// Which wall of the cavity the medium fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Reflection coefficient seen from inside the cavity. The left wall holds
/// the medium itself, the right wall its conjugate.
pub fn interface_reflection(medium: MediumParams, side: Side) -> Result<Complex64> {
    let eta = medium.impedance_ratio();
    let (num, den) = match side {
        Side::Left => (1.0 - eta, 1.0 + eta),
        Side::Right => (1.0 + eta.conj(), 1.0 - eta.conj()),
    };
    if den.norm() < 1e-12 {
        return Err(Error::PoleAtInterface { denominator: den.norm() });
    }
    Ok(num / den)
}

/// `(r_L, r_R)` of the box boundary rows at wavenumber `k`, for which
/// `r_L r_R e^{2ikL} = 1` is the box quantization condition.
pub fn box_reflection(config: &BoxConfig, k: Complex64) -> Result<(Complex64, Complex64)> {
    let i = Complex64::new(0.0, 1.0);
    let (l1, l2) = (config.boundary.ell1, config.boundary.ell2);
    let den_l = 1.0 + k * l2 - i * k * l1;
    let den_r = 1.0 - k * l2 - i * k * l1;
    for den in [den_l, den_r] {
        if den.norm() < 1e-12 {
            return Err(Error::PoleAtInterface { denominator: den.norm() });
        }
    }
    let r_l = -(1.0 - k * l2 + i * k * l1) / den_l;
    let r_r = -(1.0 + k * l2 + i * k * l1) / den_r;
    Ok((r_l, r_r))
}

/// Zeros of `r_L r_R e^{2ikL} − 1` inside `region`.
pub fn cavity_modes(r_l: Complex64, r_r: Complex64, length: f64, region: Rect) -> Result<Vec<Complex64>> {
    let product = r_l * r_r;
    if product.norm() == 0.0 {
        return Err(Error::InvalidParameter("cavity needs r_L r_R != 0".into()));
    }
    if !(length > 0.0) {
        return Err(Error::InvalidParameter(format!("cavity length must be positive, got {length}")));
    }
    let i = Complex64::new(0.0, 1.0);
    let f = |k: Complex64| {
        let e = product * (2.0 * i * k * length).exp();
        (e - 1.0, 2.0 * i * length * e)
    };
    let mut zeros = zeros_in_rect(&f, region, ContourOptions::default())?.zeros;
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(zeros)
}
