//! Similarity kernels between the hard-wall box and the `ℓ₁ = 0` box.
//!
//! With `ξₙ(x) = √(2/L) sin(nπx/L)` and `ψₙ`, `φₙ` the biorthonormal modes of
//! the `ℓ₁ = 0` box, `K(x, x′) = Σ ψₙ(x) ξₙ(x′)` maps `ξₙ → ψₙ` and
//! `M(x, x′) = Σ ξₙ(x) φₙ*(x′)` maps back. Writing `y = πℓ₂n/L`,
//!
//! `K = K₁ + K₂`, where `K₁` keeps the large-`n` form of each term and sums in
//! closed form, while `K₂` collects the `O(1/n²)` remainders and converges
//! absolutely. `K₁` diverges logarithmically and as `cot` at `x = x′`, which
//! no bounded `K₂` can cancel: `K` is non-local.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inner_products::{ModeSum, WaveFunction};
use crate::quadrature::integrate;
use crate::spectrum::{closed_form_modes, BoxConfig, Mode, CATASTROPHE_TOL};

/// Default truncation for `K₂`, `M` and the bound.
pub const DEFAULT_TERMS: usize = 500;

/// Separation below which `K₁` is not evaluated.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// `√(2/L) sin(nπx/L)`.
#[must_use]
pub fn textbook_mode(n: usize, x: f64, length: f64) -> f64 {
    (2.0 / length).sqrt() * (n as f64 * PI * x / length).sin()
}

/// Geometry of the `ℓ₁ = 0` box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBox {
    pub length: f64,
    pub ell2: f64,
}

impl KernelBox {
    pub fn new(length: f64, ell2: f64) -> Result<Self> {
        BoxConfig::new(length, 0.0, ell2)?;
        Ok(Self { length, ell2 })
    }

    fn config(&self) -> BoxConfig {
        BoxConfig::new(self.length, 0.0, self.ell2).expect("validated on construction")
    }

    fn y(&self, n: usize) -> f64 {
        PI * self.ell2 * n as f64 / self.length
    }

    fn require_nonhermitian(&self) -> Result<()> {
        if self.ell2 == 0.0 {
            return Err(Error::InvalidParameter("K1/K2 split needs ell2 != 0".into()));
        }
        Ok(())
    }

    fn check_points(&self, x: f64, x_prime: f64) -> Result<()> {
        for v in [x, x_prime] {
            if !(v > 0.0 && v < self.length) {
                return Err(Error::OutOfDomain { x: v, length: self.length });
            }
        }
        Ok(())
    }

    fn check_catastrophe(&self, n_terms: usize) -> Result<()> {
        for n in 1..=n_terms {
            let gap = (1.0 - self.y(n).powi(2)).abs();
            if gap < CATASTROPHE_TOL {
                return Err(Error::CatastrophePoint { n, ratio: gap });
            }
        }
        Ok(())
    }
}

/// How [`kernel_k`] sums the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    /// `(C,2)` means of the `K₁` series plus partial sums of the `K₂` series.
    DirectSum,
    /// Closed-form `K₁` plus partial sums of the `K₂` series.
    SplitClosed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEvaluation {
    pub x: f64,
    pub x_prime: f64,
    pub value: Complex64,
    pub n_terms: usize,
    pub method: KernelMethod,
}

/// `K₁` in closed form:
/// `(1/π|ℓ₂|) ln|sin(π(x+x′)/2L)/sin(π(x−x′)/2L)|
///  + i sgn(ℓ₂)(1/2L)[cot(π(x′−x)/2L) + cot(π(x′+x)/2L)]`.
pub fn k1_closed(b: &KernelBox, x: f64, x_prime: f64) -> Result<Complex64> {
    b.require_nonhermitian()?;
    b.check_points(x, x_prime)?;
    let sep = (x - x_prime).abs();
    if sep < COINCIDENCE_TOL {
        return Err(Error::CoincidentPoints(sep));
    }
    let l = b.length;
    let half = PI / (2.0 * l);
    let re = ((half * (x + x_prime)).sin() / (half * (x - x_prime)).sin()).abs().ln() / (PI * b.ell2.abs());
    let cot = |t: f64| t.cos() / t.sin();
    let im = b.ell2.signum() / (2.0 * l) * (cot(half * (x_prime - x)) + cot(half * (x_prime + x)));
    Ok(Complex64::new(re, im))
}

/// The `n`-th term of the `K₁` series.
fn k1_term(b: &KernelBox, n: usize, x: f64, x_prime: f64) -> Complex64 {
    let k = n as f64 * PI / b.length;
    let (sx, cx) = (k * x).sin_cos();
    let sxp = (k * x_prime).sin();
    let y = b.y(n);
    (2.0 / b.length) * Complex64::new(sx * sxp / y.abs(), b.ell2.signum() * cx * sxp)
}

/// The `n`-th term of the `K₂` series.
fn k2_term(b: &KernelBox, n: usize, x: f64, x_prime: f64) -> Complex64 {
    let k = n as f64 * PI / b.length;
    let (sx, cx) = (k * x).sin_cos();
    let sxp = (k * x_prime).sin();
    let y = b.y(n);
    let root = (1.0 - y * y).abs().sqrt();
    let re = 1.0 / root - 1.0 / y.abs();
    let im = y / root - b.ell2.signum();
    (2.0 / b.length) * Complex64::new(re * sx * sxp, im * sxp * cx)
}

/// `Σ_{n ≤ N}` of the `K₂` series.
pub fn k2_truncated(b: &KernelBox, x: f64, x_prime: f64, n_terms: usize) -> Result<Complex64> {
    b.require_nonhermitian()?;
    b.check_points(x, x_prime)?;
    b.check_catastrophe(n_terms)?;
    Ok((1..=n_terms).map(|n| k2_term(b, n, x, x_prime)).sum())
}

/// `K(x, x′)` truncated at `n_terms`.
pub fn kernel_k(b: &KernelBox, x: f64, x_prime: f64, n_terms: usize, method: KernelMethod) -> Result<KernelEvaluation> {
    let value = match method {
        KernelMethod::SplitClosed => k1_closed(b, x, x_prime)? + k2_truncated(b, x, x_prime, n_terms)?,
        KernelMethod::DirectSum => {
            let k2 = k2_truncated(b, x, x_prime, n_terms)?;
            let nf = n_terms as f64;
            let norm = (nf + 1.0) * (nf + 2.0);
            let k1: Complex64 = (1..=n_terms)
                .map(|n| {
                    let r = nf - n as f64;
                    k1_term(b, n, x, x_prime) * ((r + 1.0) * (r + 2.0) / norm)
                })
                .sum();
            k1 + k2
        }
    };
    Ok(KernelEvaluation { x, x_prime, value, n_terms, method })
}

/// `M(x, x′) = Σ_{n ≤ N} ξₙ(x) φₙ*(x′)`.
pub fn kernel_m(b: &KernelBox, x: f64, x_prime: f64, n_terms: usize) -> Result<Complex64> {
    b.check_points(x, x_prime)?;
    let modes = closed_form_modes(&b.config(), n_terms)?.modes;
    Ok(modes
        .iter()
        .map(|m| textbook_mode(m.n, x, b.length) * m.adjoint_value(x_prime).conj())
        .sum())
}

/// A function on `[0, L]` expanded in the hard-wall modes.
struct SineSeries {
    length: f64,
    coeffs: Vec<Complex64>,
}

impl WaveFunction for SineSeries {
    fn length(&self) -> f64 {
        self.length
    }

    fn eval(&self, x: f64) -> Complex64 {
        self.coeffs.iter().enumerate().map(|(i, c)| c * textbook_mode(i + 1, x, self.length)).sum()
    }

    fn wavenumber(&self) -> f64 {
        self.coeffs.len() as f64 * PI / self.length
    }
}

fn modes(b: &KernelBox, n_terms: usize) -> Result<Vec<Mode>> {
    Ok(closed_form_modes(&b.config(), n_terms)?.modes)
}

fn max_deviation<F: WaveFunction + ?Sized, G: WaveFunction + ?Sized>(a: &F, g: &G, points: usize) -> f64 {
    let l = a.length();
    (0..=points)
        .map(|i| {
            let x = l * i as f64 / points as f64;
            (a.eval(x) - g.eval(x)).norm()
        })
        .fold(0.0, f64::max)
}

/// `max_x |(M_N K_N f)(x) − f(x)|` on 201 points, with both kernels applied
/// by quadrature through their separable forms.
pub fn left_inverse_residual<F: WaveFunction + ?Sized>(b: &KernelBox, f: &F, n_terms: usize) -> Result<f64> {
    let ms = modes(b, n_terms)?;
    let l = b.length;
    // K f = Σ ψₙ ⟨ξₙ, f⟩.
    let kf = ModeSum {
        modes: &ms,
        coeffs: (1..=n_terms)
            .map(|n| integrate(0.0, l, n as f64 * PI / l + f.wavenumber(), |x| textbook_mode(n, x, l) * f.eval(x)))
            .collect(),
    };
    // M g = Σ ξₙ ∫ φₙ* g.
    let mkf = SineSeries {
        length: l,
        coeffs: ms
            .iter()
            .map(|m| integrate(0.0, l, m.wavenumber() + kf.wavenumber(), |x| m.adjoint_value(x).conj() * kf.eval(x)))
            .collect(),
    };
    Ok(max_deviation(&mkf, f, 200))
}

/// `max_x |(K_N M_N f)(x) − f(x)|` on 201 points. Completeness of the
/// `ψₙ` is not established, so this is a diagnostic only.
pub fn right_inverse_residual<F: WaveFunction + ?Sized>(b: &KernelBox, f: &F, n_terms: usize) -> Result<f64> {
    let ms = modes(b, n_terms)?;
    let l = b.length;
    // M f = Σ ξₙ ∫ φₙ* f.
    let mf = SineSeries {
        length: l,
        coeffs: ms
            .iter()
            .map(|m| integrate(0.0, l, m.wavenumber() + f.wavenumber(), |x| m.adjoint_value(x).conj() * f.eval(x)))
            .collect(),
    };
    // K g = Σ ψₙ ⟨ξₙ, g⟩.
    let kmf = ModeSum {
        modes: &ms,
        coeffs: (1..=n_terms)
            .map(|n| integrate(0.0, l, n as f64 * PI / l + mf.wavenumber(), |x| textbook_mode(n, x, l) * mf.eval(x)))
            .collect(),
    };
    Ok(max_deviation(&kmf, f, 200))
}

/// An upper bound on `|K₂(x, x′)|` valid for every `(x, x′)`.
///
/// Sums `(2/L)Σ (|c₁ₙ| + |c₂ₙ|)` exactly for `n ≤ n_tail`, with
/// `c₁ = |1−y²|^{−1/2} − 1/|y|` and `c₂ = y|1−y²|^{−1/2} − sgn ℓ₂`, and bounds
/// the rest through `(1 − u)^{−1/2} − 1 ≤ u/(1 − u)`, `u = 1/y²`:
/// `(2/L)a²/(N(1 − u_N)) + (2/L)a³/(2N²(1 − u_N))` with `a = L/(π|ℓ₂|)`.
/// `n_tail` is raised until `u_N ≤ 1/2`.
pub fn k2_bound(b: &KernelBox, n_tail: usize) -> Result<f64> {
    b.require_nonhermitian()?;
    let a = b.length / (PI * b.ell2.abs());
    let mut n_tail = n_tail.max(1);
    while (a / n_tail as f64).powi(2) > 0.5 {
        n_tail *= 2;
    }
    b.check_catastrophe(n_tail)?;
    let head: f64 = (1..=n_tail)
        .map(|n| {
            let y = b.y(n);
            let root = (1.0 - y * y).abs().sqrt();
            (1.0 / root - 1.0 / y.abs()).abs() + (y / root - b.ell2.signum()).abs()
        })
        .sum();
    let nf = n_tail as f64;
    let u = (a / nf).powi(2);
    let tail = a * a / (nf * (1.0 - u)) + a.powi(3) / (2.0 * nf * nf * (1.0 - u));
    Ok(2.0 / b.length * (head + tail))
}

/// A point pair where `|K₁|` alone exceeds ten times the `K₂` bound, so
/// `K(x, x′) ≠ 0` with `x ≠ x′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlocalityWitness {
    pub x: f64,
    pub x_prime: f64,
    pub k1_abs: f64,
    pub k2_bound: f64,
    /// `|K₁|/bound`.
    pub margin: f64,
}

/// Shrinks a pair centred at `L/2` by factor `shrink` per step until the
/// margin reaches 10.
pub fn nonlocality_report_with(b: &KernelBox, shrink: f64) -> Result<NonlocalityWitness> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidParameter(format!("shrink factor must lie in (0, 1), got {shrink}")));
    }
    let bound = k2_bound(b, DEFAULT_TERMS)?;
    let centre = 0.5 * b.length;
    let mut sep = 0.5 * b.length;
    while sep >= 10.0 * COINCIDENCE_TOL {
        let (x, x_prime) = (centre - 0.5 * sep, centre + 0.5 * sep);
        let k1_abs = k1_closed(b, x, x_prime)?.norm();
        if k1_abs >= 10.0 * bound {
            return Ok(NonlocalityWitness { x, x_prime, k1_abs, k2_bound: bound, margin: k1_abs / bound });
        }
        sep *= shrink;
    }
    Err(Error::CoincidentPoints(sep))
}

/// [`nonlocality_report_with`] halving the separation each step.
pub fn nonlocality_report(b: &KernelBox) -> Result<NonlocalityWitness> {
    nonlocality_report_with(b, 0.5)
}

/// `K` on the interior grid `xᵢ = (i + ½)L/points`, skipping the diagonal.
/// Rows are ordered by `x`, then `x′`.
pub fn kernel_grid(b: &KernelBox, points: usize, n_terms: usize, method: KernelMethod) -> Result<Vec<KernelEvaluation>> {
    let xs: Vec<f64> = (0..points).map(|i| (i as f64 + 0.5) * b.length / points as f64).collect();
    let pairs: Vec<(f64, f64)> =
        xs.iter().flat_map(|&x| xs.iter().filter(move |&&y| y != x).map(move |&y| (x, y))).collect();
    pairs.par_iter().map(|&(x, y)| kernel_k(b, x, y, n_terms, method)).collect()
}
