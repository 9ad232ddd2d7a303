//! Canonical, PT and CPT inner products and the truncated C operator.
//!
//! With `h = −½ d²/dx²`:
//!
//! - canonical: `(φ, ψ) = ∫₀ᴸ φ*(x) ψ(x) dx`
//! - PT: `(φ, ψ)_PT = ∫₀ᴸ φ*(L − x) ψ(x) dx`
//! - CPT: `(φ, ψ)_CPT = ∫∫ ψ(x) C(x, x′) φ*(L − x′) dx′ dx` with
//!   `C(x, x′) = Σₙ (−1)^{n+1} ψₙ(x) ψₙ(x′)`.
//!
//! The truncated C kernel is separable, so the double integral is evaluated
//! as a sum of products of single integrals over the same quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::spectrum::{BoxConfig, Mode, Spectrum, CATASTROPHE_TOL};

/// Default number of modes kept in the C kernel.
pub const DEFAULT_C_TERMS: usize = 24;

/// A function on `[0, L]`.
pub trait WaveFunction {
    fn length(&self) -> f64;
    fn eval(&self, x: f64) -> Complex64;
    /// Fastest oscillation present, used to size quadrature panels.
    fn wavenumber(&self) -> f64;
}

/// A wave function with analytic first and second derivatives.
pub trait SmoothWaveFunction: WaveFunction {
    fn derivative(&self, x: f64) -> Complex64;
    fn second_derivative(&self, x: f64) -> Complex64;
}

impl WaveFunction for Mode {
    fn length(&self) -> f64 {
        self.length
    }

    fn eval(&self, x: f64) -> Complex64 {
        self.value(x)
    }

    fn wavenumber(&self) -> f64 {
        Mode::wavenumber(self)
    }
}

impl SmoothWaveFunction for Mode {
    fn derivative(&self, x: f64) -> Complex64 {
        Mode::derivative(self, x)
    }

    fn second_derivative(&self, x: f64) -> Complex64 {
        Mode::second_derivative(self, x)
    }
}

/// The adjoint eigenfunction `φₙ` of a mode.
#[derive(Debug, Clone, Copy)]
pub struct AdjointMode<'a>(pub &'a Mode);

impl WaveFunction for AdjointMode<'_> {
    fn length(&self) -> f64 {
        self.0.length
    }

    fn eval(&self, x: f64) -> Complex64 {
        self.0.adjoint_value(x)
    }

    fn wavenumber(&self) -> f64 {
        self.0.wavenumber()
    }
}

impl SmoothWaveFunction for AdjointMode<'_> {
    fn derivative(&self, x: f64) -> Complex64 {
        self.0.adjoint_derivative(x)
    }

    fn second_derivative(&self, x: f64) -> Complex64 {
        let k = self.0.k.conj();
        -k * k * self.0.adjoint_value(x)
    }
}

type RealToComplex = Box<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A closure-backed wave function.
pub struct Analytic {
    pub length: f64,
    pub wavenumber: f64,
    f: RealToComplex,
}

impl Analytic {
    pub fn new(length: f64, wavenumber: f64, f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { length, wavenumber, f: Box::new(f) }
    }
}

impl WaveFunction for Analytic {
    fn length(&self) -> f64 {
        self.length
    }

    fn eval(&self, x: f64) -> Complex64 {
        (self.f)(x)
    }

    fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
}

/// A closure-backed wave function with its first two derivatives.
pub struct SmoothAnalytic {
    pub length: f64,
    pub wavenumber: f64,
    f: RealToComplex,
    df: RealToComplex,
    d2f: RealToComplex,
}

impl SmoothAnalytic {
    pub fn new(
        length: f64,
        wavenumber: f64,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        df: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        d2f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { length, wavenumber, f: Box::new(f), df: Box::new(df), d2f: Box::new(d2f) }
    }
}

impl WaveFunction for SmoothAnalytic {
    fn length(&self) -> f64 {
        self.length
    }

    fn eval(&self, x: f64) -> Complex64 {
        (self.f)(x)
    }

    fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
}

impl SmoothWaveFunction for SmoothAnalytic {
    fn derivative(&self, x: f64) -> Complex64 {
        (self.df)(x)
    }

    fn second_derivative(&self, x: f64) -> Complex64 {
        (self.d2f)(x)
    }
}

/// A finite combination `Σ cₙ ψₙ` of modes.
#[derive(Debug, Clone)]
pub struct ModeSum<'a> {
    pub modes: &'a [Mode],
    pub coeffs: Vec<Complex64>,
}

impl WaveFunction for ModeSum<'_> {
    fn length(&self) -> f64 {
        self.modes.first().map_or(0.0, |m| m.length)
    }

    fn eval(&self, x: f64) -> Complex64 {
        self.modes.iter().zip(&self.coeffs).map(|(m, c)| c * m.value(x)).sum()
    }

    fn wavenumber(&self) -> f64 {
        self.modes.iter().map(Mode::wavenumber).fold(0.0, f64::max)
    }
}

/// Samples on a strictly increasing grid spanning `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWave {
    grid: Vec<f64>,
    values: Vec<Complex64>,
}

impl SampledWave {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::GridMismatch);
        }
        if grid[0] != 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` on `points + 1` uniform nodes.
    pub fn uniform<W: WaveFunction + ?Sized>(f: &W, points: usize) -> Result<Self> {
        let l = f.length();
        let grid: Vec<f64> = (0..=points).map(|i| l * i as f64 / points as f64).collect();
        let values = grid.iter().map(|&x| f.eval(x)).collect();
        Self::new(grid, values)
    }

    #[must_use]
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    #[must_use]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[must_use]
    pub fn length(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    fn same_grid(&self, other: &Self) -> bool {
        let tol = 1e-12 * self.length();
        self.grid.len() == other.grid.len() && self.grid.iter().zip(&other.grid).all(|(a, b)| (a - b).abs() <= tol)
    }

    fn is_symmetric(&self) -> bool {
        let l = self.length();
        let n = self.grid.len();
        (0..n).all(|i| (self.grid[i] + self.grid[n - 1 - i] - l).abs() <= 1e-12 * l)
    }
}

/// Composite Simpson rule on a non-uniform grid; a trailing odd interval
/// gets the quadratic through its last three nodes.
fn simpson(x: &[f64], y: &[Complex64]) -> Complex64 {
    let n = x.len();
    if n == 2 {
        return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut i = 0;
    while i + 2 < n {
        acc += simpson_pair(x[i], x[i + 1], x[i + 2], y[i], y[i + 1], y[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        // ∫ over [x_{n−2}, x_{n−1}] of the quadratic through the last three nodes.
        let (x0, x1, x2) = (x[n - 3], x[n - 2], x[n - 1]);
        let (h0, h1) = (x1 - x0, x2 - x1);
        let w2 = h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
        let w1 = h1 * (h1 + 3.0 * h0) / (6.0 * h0);
        let w0 = -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        acc += y[n - 3] * w0 + y[n - 2] * w1 + y[n - 1] * w2;
    }
    acc
}

fn simpson_pair(x0: f64, x1: f64, x2: f64, y0: Complex64, y1: Complex64, y2: Complex64) -> Complex64 {
    let (h0, h1) = (x1 - x0, x2 - x1);
    let s = h0 + h1;
    let w0 = s * (2.0 * h0 - h1) / (6.0 * h0);
    let w1 = s * s * s / (6.0 * h0 * h1);
    let w2 = s * (2.0 * h1 - h0) / (6.0 * h1);
    y0 * w0 + y1 * w1 + y2 * w2
}

fn common_length(a: f64, b: f64) -> Result<f64> {
    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
        return Err(Error::GridMismatch);
    }
    Ok(a)
}

/// `∫₀ᴸ φ*(x) ψ(x) dx`.
pub fn canonical_inner<A, B>(phi: &A, psi: &B) -> Result<Complex64>
where
    A: WaveFunction + ?Sized,
    B: WaveFunction + ?Sized,
{
    let l = common_length(phi.length(), psi.length())?;
    let k = phi.wavenumber() + psi.wavenumber();
    Ok(integrate(0.0, l, k, |x| phi.eval(x).conj() * psi.eval(x)))
}

/// `∫₀ᴸ φ*(L − x) ψ(x) dx`.
pub fn pt_inner<A, B>(phi: &A, psi: &B) -> Result<Complex64>
where
    A: WaveFunction + ?Sized,
    B: WaveFunction + ?Sized,
{
    let l = common_length(phi.length(), psi.length())?;
    let k = phi.wavenumber() + psi.wavenumber();
    Ok(integrate(0.0, l, k, |x| phi.eval(l - x).conj() * psi.eval(x)))
}

/// Canonical inner product of two samplings on the same grid.
pub fn canonical_inner_sampled(phi: &SampledWave, psi: &SampledWave) -> Result<Complex64> {
    if !phi.same_grid(psi) {
        return Err(Error::GridMismatch);
    }
    let y: Vec<Complex64> = phi.values.iter().zip(&psi.values).map(|(a, b)| a.conj() * b).collect();
    Ok(simpson(&phi.grid, &y))
}

/// PT inner product of two samplings on the same grid, which must be
/// symmetric under `x → L − x`.
pub fn pt_inner_sampled(phi: &SampledWave, psi: &SampledWave) -> Result<Complex64> {
    if !phi.same_grid(psi) || !phi.is_symmetric() {
        return Err(Error::GridMismatch);
    }
    let n = phi.values.len();
    let y: Vec<Complex64> = (0..n).map(|i| phi.values[n - 1 - i].conj() * psi.values[i]).collect();
    Ok(simpson(&phi.grid, &y))
}

/// `[φ*(L − x) ψ′(x) + φ′*(L − x) ψ(x)]₀ᴸ`.
pub fn pt_surface_bracket<A, B>(phi: &A, psi: &B) -> Complex64
where
    A: SmoothWaveFunction + ?Sized,
    B: SmoothWaveFunction + ?Sized,
{
    let l = psi.length();
    let at = |x: f64| phi.eval(l - x).conj() * psi.derivative(x) + phi.derivative(l - x).conj() * psi.eval(x);
    at(l) - at(0.0)
}

/// `(φ, hψ)_PT − (hφ, ψ)_PT` by quadrature. Integration by parts gives
/// `−½` times [`pt_surface_bracket`].
pub fn pt_selfadjoint_residual<A, B>(config: &BoxConfig, phi: &A, psi: &B) -> Complex64
where
    A: SmoothWaveFunction + ?Sized,
    B: SmoothWaveFunction + ?Sized,
{
    let l = config.length;
    let k = phi.wavenumber() + psi.wavenumber();
    integrate(0.0, l, k, |x| {
        let h_psi = -0.5 * psi.second_derivative(x);
        let h_phi = -0.5 * phi.second_derivative(l - x);
        phi.eval(l - x).conj() * h_psi - h_phi.conj() * psi.eval(x)
    })
}

/// `ℓ₂ = L/(πn)`, `n = 1..=n_max`: the values at which mode `n` of the
/// `ℓ₁ = 0` box has zero PT norm.
pub fn catastrophe_levels(config: &BoxConfig, n_max: usize) -> Result<Vec<f64>> {
    if config.boundary.ell1 != 0.0 {
        return Err(Error::NotMaximallyNonHermitian(config.boundary.ell1));
    }
    Ok((1..=n_max).map(|n| config.length / (std::f64::consts::PI * n as f64)).collect())
}

/// The first `n_terms` modes of a spectrum, defining a truncated C kernel.
#[derive(Debug, Clone, Copy)]
pub struct CKernelTruncation<'a> {
    pub n_terms: usize,
    pub spectrum: &'a Spectrum,
}

impl<'a> CKernelTruncation<'a> {
    pub fn new(spectrum: &'a Spectrum, n_terms: usize) -> Result<Self> {
        if n_terms == 0 || n_terms > spectrum.modes.len() {
            return Err(Error::InvalidParameter(format!(
                "C kernel needs 1..={} terms, got {n_terms}",
                spectrum.modes.len()
            )));
        }
        for m in &spectrum.modes[..n_terms] {
            if !(m.norm.is_finite() && m.norm.norm() > 0.0) {
                return Err(Error::CatastrophePoint { n: m.n, ratio: 0.0 });
            }
            let l2 = spectrum.config.boundary.ell2;
            let gap = (1.0 - m.k.norm_sqr() * l2 * l2).abs();
            if spectrum.config.boundary.ell1 == 0.0 && gap < CATASTROPHE_TOL {
                return Err(Error::CatastrophePoint { n: m.n, ratio: gap });
            }
        }
        Ok(Self { n_terms, spectrum })
    }

    /// Truncation with [`DEFAULT_C_TERMS`] modes.
    pub fn with_default(spectrum: &'a Spectrum) -> Result<Self> {
        Self::new(spectrum, DEFAULT_C_TERMS)
    }

    #[must_use]
    pub fn modes(&self) -> &'a [Mode] {
        &self.spectrum.modes[..self.n_terms]
    }

    fn length(&self) -> f64 {
        self.spectrum.config.length
    }
}

fn c_sign(n: usize) -> f64 {
    if n % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `Σ_{n ≤ n_terms} (−1)^{n+1} ψₙ(x) ψₙ(x′)`.
pub fn c_kernel(x: f64, x_prime: f64, trunc: &CKernelTruncation<'_>) -> Result<Complex64> {
    let l = trunc.length();
    for v in [x, x_prime] {
        if !(v >= 0.0 && v <= l) {
            return Err(Error::OutOfDomain { x: v, length: l });
        }
    }
    Ok(trunc.modes().iter().map(|m| c_sign(m.n) * m.value(x) * m.value(x_prime)).sum())
}

/// `x ↦ ∫₀ᴸ C(x, y) f(y) dy`, returned as a mode combination.
pub fn c_apply<'a, W>(f: &W, trunc: &CKernelTruncation<'a>) -> Result<ModeSum<'a>>
where
    W: WaveFunction + ?Sized,
{
    let l = common_length(f.length(), trunc.length())?;
    let coeffs = trunc
        .modes()
        .iter()
        .map(|m| {
            let k = m.wavenumber() + f.wavenumber();
            c_sign(m.n) * integrate(0.0, l, k, |y| m.value(y) * f.eval(y))
        })
        .collect();
    Ok(ModeSum { modes: trunc.modes(), coeffs })
}

/// `∫∫ ψ(x) C(x, x′) φ*(L − x′) dx′ dx` over the truncated kernel.
pub fn cpt_inner<A, B>(phi: &A, psi: &B, trunc: &CKernelTruncation<'_>) -> Result<Complex64>
where
    A: WaveFunction + ?Sized,
    B: WaveFunction + ?Sized,
{
    let l = common_length(phi.length(), psi.length())?;
    common_length(l, trunc.length())?;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in trunc.modes() {
        let left = integrate(0.0, l, m.wavenumber() + psi.wavenumber(), |x| psi.eval(x) * m.value(x));
        let right = integrate(0.0, l, m.wavenumber() + phi.wavenumber(), |x| m.value(x) * phi.eval(l - x).conj());
        acc += c_sign(m.n) * left * right;
    }
    Ok(acc)
}

/// `G[i][j] = (ψᵢ, ψⱼ)_PT` over the first `n` modes.
pub fn pt_gram(spectrum: &Spectrum, n: usize) -> Result<Vec<Vec<Complex64>>> {
    let modes = spectrum.modes.get(..n).ok_or_else(|| too_few(spectrum, n))?;
    modes.iter().map(|a| modes.iter().map(|b| pt_inner(a, b)).collect()).collect()
}

/// `G[i][j] = (ψᵢ, ψⱼ)_CPT` over the first `n` modes.
pub fn cpt_gram(trunc: &CKernelTruncation<'_>, n: usize) -> Result<Vec<Vec<Complex64>>> {
    let modes = trunc.spectrum.modes.get(..n).ok_or_else(|| too_few(trunc.spectrum, n))?;
    modes.iter().map(|a| modes.iter().map(|b| cpt_inner(a, b, trunc)).collect()).collect()
}

/// `G[i][j] = ∫ φᵢ* ψⱼ` with `φ` the adjoint modes.
pub fn biorthogonal_gram(spectrum: &Spectrum, n: usize) -> Result<Vec<Vec<Complex64>>> {
    let modes = spectrum.modes.get(..n).ok_or_else(|| too_few(spectrum, n))?;
    modes.iter().map(|a| modes.iter().map(|b| canonical_inner(&AdjointMode(a), b)).collect()).collect()
}

/// `max |G − I|`.
#[must_use]
pub fn identity_deviation(g: &[Vec<Complex64>]) -> f64 {
    g.iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (v - if i == j { 1.0 } else { 0.0 }).norm()))
        .fold(0.0, f64::max)
}

fn too_few(spectrum: &Spectrum, n: usize) -> Error {
    Error::InvalidParameter(format!("requested {n} modes, spectrum has {}", spectrum.modes.len()))
}
