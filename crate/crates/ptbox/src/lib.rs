//! PT-symmetric particle in a box.
//!
//! A kinetic Hamiltonian `h = -½ d²/dx²` on `[0, L]` with boundary rows
//! `ψ(0) = λ₁ψ′(0)`, `ψ(L) = λ₂ψ′(L)` (units ħ = m = 1), together with the
//! electromagnetic two-slab analog and the similarity kernels linking the
//! `ℓ₁ = 0` family to the hard-wall box.
//!
//! Module map:
//! - [`boundary`]: boundary-condition pairs and their classification.
//! - [`spectrum`]: quantization, modes, biorthonormal normalization.
//! - [`inner_products`]: canonical, PT and CPT inner products, the C kernel.
//! - [`variational`]: finite-dimensional PT variational principle.
//! - [`em_scattering`]: transfer matrices, S matrices, double-barrier resonances.
//! - [`kernel_maps`]: the K and M kernels and the non-locality witness.

pub mod boundary;
pub mod em_scattering;
pub mod error;
pub mod inner_products;
pub mod kernel_maps;
pub mod lsq;
pub mod quadrature;
pub mod roots;
pub mod spectrum;
pub mod variational;

pub use error::{Error, Result};
pub use num_complex::Complex64;
