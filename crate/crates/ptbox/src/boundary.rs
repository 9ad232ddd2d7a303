//! Boundary-condition pairs `ψ(0) = λ₁ψ′(0)`, `ψ(L) = λ₂ψ′(L)`.
//!
//! Hermitian pairs have both `λ` real; PT-symmetric pairs satisfy
//! `λ₂ = −λ₁*` and form the family `(ℓ₁ + iℓ₂, −ℓ₁ + iℓ₂)`. The families
//! meet along `ℓ₂ = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for every classification comparison.
pub const TAU_BC: f64 = 1e-12;

/// The pair `(λ₁, λ₂)` in the `ψ = λψ′` convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPair {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

impl BoundaryPair {
    pub fn new(lambda1: Complex64, lambda2: Complex64) -> Result<Self> {
        if !(lambda1.is_finite() && lambda2.is_finite()) {
            return Err(Error::InvalidParameter("boundary parameters must be finite".into()));
        }
        Ok(Self { lambda1, lambda2 })
    }
}

/// Real parameters of the PT-symmetric family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PTBoundaryParams {
    pub ell1: f64,
    pub ell2: f64,
}

impl PTBoundaryParams {
    pub fn new(ell1: f64, ell2: f64) -> Result<Self> {
        if !(ell1.is_finite() && ell2.is_finite()) {
            return Err(Error::InvalidParameter("ell1 and ell2 must be finite".into()));
        }
        Ok(Self { ell1, ell2 })
    }

    /// `ℓ₁² + ℓ₂²`.
    #[must_use]
    pub fn modulus_sq(&self) -> f64 {
        self.ell1 * self.ell1 + self.ell2 * self.ell2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClass {
    Hermitian,
    PTSymmetric,
    Both,
    Neither,
}

/// Twist parameter of a ring threaded by flux, `ψ(θ + 2π) = λψ(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingTwist {
    pub lambda: Complex64,
}

/// `(ℓ₁ + iℓ₂, −ℓ₁ + iℓ₂)`.
#[must_use]
pub fn pt_pair(params: PTBoundaryParams) -> BoundaryPair {
    BoundaryPair {
        lambda1: Complex64::new(params.ell1, params.ell2),
        lambda2: Complex64::new(-params.ell1, params.ell2),
    }
}

/// `(λ₁*, λ₂*)`.
#[must_use]
pub fn adjoint_pair(pair: BoundaryPair) -> BoundaryPair {
    BoundaryPair { lambda1: pair.lambda1.conj(), lambda2: pair.lambda2.conj() }
}

#[must_use]
pub fn classify(pair: BoundaryPair) -> BoundaryClass {
    classify_with_tol(pair, TAU_BC)
}

#[must_use]
pub fn classify_with_tol(pair: BoundaryPair, tol: f64) -> BoundaryClass {
    let hermitian = pair.lambda1.im.abs() <= tol && pair.lambda2.im.abs() <= tol;
    let pt = (pair.lambda2 + pair.lambda1.conj()).norm() <= tol;
    match (hermitian, pt) {
        (true, true) => BoundaryClass::Both,
        (true, false) => BoundaryClass::Hermitian,
        (false, true) => BoundaryClass::PTSymmetric,
        (false, false) => BoundaryClass::Neither,
    }
}

/// PT symmetry of the ring forces a real twist.
#[must_use]
pub fn ring_is_pt(twist: RingTwist) -> bool {
    twist.lambda.im.abs() <= TAU_BC
}

/// Hermiticity of the ring forces a unimodular twist.
#[must_use]
pub fn ring_is_hermitian(twist: RingTwist) -> bool {
    (twist.lambda.norm() - 1.0).abs() <= TAU_BC
}
