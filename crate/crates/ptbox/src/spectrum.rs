//! Quantization condition, eigenmodes and biorthonormal normalization.
//!
//! Modes have the form `ψ = A e^{ikx} + B e^{−ikx}` with `E = k²/2`. The
//! quantization condition is solved with its denominator cleared,
//!
//! `f(k) = e^{2ikL} D(k) − D(−k)`, `D(k) = 1 + 2ikℓ₁ − k²(ℓ₁² + ℓ₂²)`,
//!
//! which is entire. Unnormalized modes are `u(x) = sin kx + kλ₁ cos kx`; the
//! adjoint problem (conjugated boundary pair) has eigenfunctions `ū(x)`, so the
//! biorthogonal overlap reduces to the bilinear integral `c = ∫₀ᴸ u² dx`.
//!
//! For `ℓ₁ = 0` the residual factors as `(1 − k²ℓ₂²)(e^{2ikL} − 1)`: besides
//! the standing waves `k = nπ/L` there is a travelling mode `ψ ∝ e^{−ix/ℓ₂}`
//! at `k = 1/|ℓ₂|`. It is kept apart in [`Spectrum::plane_wave_mode`] so that
//! `modes[n − 1]` is always the `n`-th standing wave.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::boundary::{pt_pair, BoundaryPair, PTBoundaryParams, TAU_BC};
use crate::error::{Error, Result};
use crate::roots::{bisect, newton_bisect, zeros_in_rect, ContourOptions, Rect};

/// Root-identity tolerance: duplicate detection and the broken-PT flag.
pub const TAU_K: f64 = 1e-8;

/// Self-orthogonality guard on `|c|/(L/2)`, equal to `|1 − k²ℓ₂²|` on the
/// `ℓ₁ = 0` family.
pub const CATASTROPHE_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A box of length `L` with PT-symmetric boundary rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxConfig {
    pub length: f64,
    pub boundary: PTBoundaryParams,
}

impl BoxConfig {
    pub fn new(length: f64, ell1: f64, ell2: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!("box length must be positive, got {length}")));
        }
        Ok(Self { length, boundary: PTBoundaryParams::new(ell1, ell2)? })
    }

    #[must_use]
    pub fn pair(&self) -> BoundaryPair {
        pt_pair(self.boundary)
    }

    /// `λ₁ = ℓ₁ + iℓ₂`.
    #[must_use]
    pub fn lambda1(&self) -> Complex64 {
        self.pair().lambda1
    }

    fn s(&self) -> f64 {
        self.boundary.modulus_sq()
    }
}

/// One eigenmode.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    /// 1-based index among standing waves; 0 marks the `ℓ₁ = 0` travelling mode.
    pub n: usize,
    pub k: Complex64,
    pub energy: Complex64,
    pub coeff_a: Complex64,
    pub coeff_b: Complex64,
    pub norm: Complex64,
    pub adjoint_norm: Complex64,
    /// `±1` when `ψ*(L − x) = ±ψ(x)`.
    pub pt_eigenvalue: Option<i8>,
    pub length: f64,
}

impl Mode {
    /// Mode with `N = Ñ = 1`, i.e. `ψ = u`.
    #[must_use]
    pub fn unnormalized(config: &BoxConfig, n: usize, k: Complex64) -> Self {
        let (a, b) = unit_amplitudes(k, config.lambda1());
        let mut mode = Self {
            n,
            k,
            energy: 0.5 * k * k,
            coeff_a: a,
            coeff_b: b,
            norm: Complex64::new(1.0, 0.0),
            adjoint_norm: Complex64::new(1.0, 0.0),
            pt_eigenvalue: None,
            length: config.length,
        };
        mode.pt_eigenvalue = detect_pt_eigenvalue(&mode);
        mode
    }

    /// Biorthonormal mode: `N = 1/√|c|`, `Ñ = (N c)^{-1}*`, so that
    /// `∫ φ* ψ = 1` and `N` is real and positive.
    pub fn new(config: &BoxConfig, n: usize, k: Complex64) -> Result<Self> {
        let c = self_overlap(config, k);
        let ratio = c.norm() / (0.5 * config.length);
        if !(ratio >= CATASTROPHE_TOL) {
            return Err(Error::CatastrophePoint { n, ratio });
        }
        let mut mode = Self::unnormalized(config, n, k);
        let norm = 1.0 / c.norm().sqrt();
        mode.coeff_a *= norm;
        mode.coeff_b *= norm;
        mode.norm = Complex64::new(norm, 0.0);
        mode.adjoint_norm = (1.0 / (norm * c)).conj();
        Ok(mode)
    }

    /// `ψ(x)` without a domain check.
    #[must_use]
    pub fn value(&self, x: f64) -> Complex64 {
        let e = (I * self.k * x).exp();
        self.coeff_a * e + self.coeff_b / e
    }

    #[must_use]
    pub fn derivative(&self, x: f64) -> Complex64 {
        let e = (I * self.k * x).exp();
        I * self.k * (self.coeff_a * e - self.coeff_b / e)
    }

    #[must_use]
    pub fn second_derivative(&self, x: f64) -> Complex64 {
        -self.k * self.k * self.value(x)
    }

    /// Adjoint eigenfunction `φ(x) = (Ñ/N*) ψ(x)*`.
    #[must_use]
    pub fn adjoint_value(&self, x: f64) -> Complex64 {
        self.adjoint_ratio() * self.value(x).conj()
    }

    #[must_use]
    pub fn adjoint_derivative(&self, x: f64) -> Complex64 {
        self.adjoint_ratio() * self.derivative(x).conj()
    }

    fn adjoint_ratio(&self) -> Complex64 {
        self.adjoint_norm / self.norm.conj()
    }

    /// `|Re k|`, the oscillation wavenumber used to size quadrature panels.
    #[must_use]
    pub fn wavenumber(&self) -> f64 {
        self.k.norm()
    }

    #[must_use]
    pub fn is_real(&self) -> bool {
        self.k.im.abs() <= TAU_K * self.k.norm().max(1.0)
    }
}

/// `((kλ₁ − i)/2, (kλ₁ + i)/2)`, the amplitudes of `sin kx + kλ₁ cos kx`.
fn unit_amplitudes(k: Complex64, lambda1: Complex64) -> (Complex64, Complex64) {
    let kl = k * lambda1;
    (0.5 * (kl - I), 0.5 * (kl + I))
}

/// `c = ∫₀ᴸ u² dx` for `u = sin kx + kλ₁ cos kx`, valid for complex `k ≠ 0`.
#[must_use]
pub fn self_overlap(config: &BoxConfig, k: Complex64) -> Complex64 {
    let l = config.length;
    let lam = config.lambda1();
    let a2 = k * k * lam * lam;
    let s = (k * l).sin();
    0.5 * l * (1.0 + a2) + (a2 - 1.0) * (2.0 * k * l).sin() / (4.0 * k) + lam * s * s
}

fn detect_pt_eigenvalue(mode: &Mode) -> Option<i8> {
    if !mode.is_real() {
        return None;
    }
    let k = mode.k.re;
    let phase = Complex64::new(0.0, k * mode.length).exp();
    let a_img = mode.coeff_a.conj() / phase;
    let b_img = mode.coeff_b.conj() * phase;
    let scale = mode.coeff_a.norm() + mode.coeff_b.norm();
    let tol = 1e-8 * scale;
    for sign in [1i8, -1] {
        let s = f64::from(sign);
        if (a_img - s * mode.coeff_a).norm() <= tol && (b_img - s * mode.coeff_b).norm() <= tol {
            return Some(sign);
        }
    }
    None
}

/// All modes of one box.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub config: BoxConfig,
    /// Sorted by `Re k`, then `Im k`.
    pub modes: Vec<Mode>,
    /// Any mode with `|Im k| > τ_k`.
    pub broken: bool,
    /// The `k = 1/|ℓ₂|` travelling mode of the `ℓ₁ = 0` family, when it does
    /// not coincide with a standing wave.
    pub plane_wave_mode: Option<Mode>,
}

/// `f(k) = e^{2ikL}(1 + 2ikℓ₁ − k²s) − (1 − 2ikℓ₁ − k²s)`.
#[must_use]
pub fn quantization_residual(k: Complex64, config: &BoxConfig) -> Complex64 {
    residual_and_derivative(k, config).0
}

/// `(f(k), f′(k))`.
#[must_use]
pub fn residual_and_derivative(k: Complex64, config: &BoxConfig) -> (Complex64, Complex64) {
    let l = config.length;
    let l1 = config.boundary.ell1;
    let s = config.s();
    let e = (2.0 * I * k * l).exp();
    let d_plus = 1.0 + 2.0 * I * k * l1 - k * k * s;
    let d_minus = 1.0 - 2.0 * I * k * l1 - k * k * s;
    let dd_plus = 2.0 * I * l1 - 2.0 * k * s;
    let dd_minus = -2.0 * I * l1 - 2.0 * k * s;
    (e * d_plus - d_minus, e * (2.0 * I * l * d_plus + dd_plus) - dd_minus)
}

/// Scale against which `|f(k)|` is judged: the size of the largest term.
#[must_use]
pub fn residual_scale(k: Complex64, config: &BoxConfig) -> f64 {
    let growth = (-2.0 * k.im * config.length).exp().max(1.0);
    (k.norm_sqr() * config.s()).max(1.0) * growth
}

/// `g(k) = Im(e^{ikL} D(k)) = sin kL (1 − k²s) + 2kℓ₁ cos kL` and `g′(k)`.
/// For real `k`, `f(k) = 2i e^{ikL} g(k)`.
fn real_phase(k: f64, config: &BoxConfig) -> (f64, f64) {
    let l = config.length;
    let l1 = config.boundary.ell1;
    let s = config.s();
    let (sn, cs) = (k * l).sin_cos();
    let g = sn * (1.0 - k * k * s) + 2.0 * k * l1 * cs;
    let dg = l * cs * (1.0 - k * k * s) - 2.0 * k * s * sn + 2.0 * l1 * cs - 2.0 * k * l1 * l * sn;
    (g, dg)
}

/// Positive real roots of `f` in `(0, k_limit]`, ascending.
///
/// Scans `g(k)/k` (finite at 0, where it equals `L + 2ℓ₁`) with step
/// `π/(8L)`. Sign changes are refined by safeguarded Newton. Intervals where
/// `|g/k|` dips without changing sign are searched for their extremum, which
/// exposes close root pairs and double roots.
#[must_use]
pub fn real_roots(config: &BoxConfig, k_limit: f64) -> Vec<f64> {
    let l = config.length;
    let s = config.s();
    let step = PI / (8.0 * l);
    let count = (k_limit / step).ceil() as usize + 1;
    let g = |k: f64| real_phase(k, config);
    let h = |k: f64| if k == 0.0 { l + 2.0 * config.boundary.ell1 } else { g(k).0 / k };
    let dh = |k: f64| {
        if k == 0.0 {
            return 0.0;
        }
        let (v, d) = g(k);
        (d * k - v) / (k * k)
    };
    let ks: Vec<f64> = (0..=count).map(|i| i as f64 * step).collect();
    let hs: Vec<f64> = ks.iter().map(|&k| h(k)).collect();
    let dhs: Vec<f64> = ks.iter().map(|&k| dh(k)).collect();

    let mut roots = Vec::new();
    for i in 0..count {
        let (a, b) = (ks[i], ks[i + 1]);
        if hs[i] == 0.0 && i > 0 {
            roots.push(a);
            continue;
        }
        if hs[i] * hs[i + 1] < 0.0 {
            roots.push(newton_bisect(g, a, b));
            continue;
        }
        let sign = hs[i].signum();
        if sign * dhs[i] < 0.0 && sign * dhs[i + 1] > 0.0 {
            let ke = bisect(dh, a, b);
            let he = h(ke);
            if he * sign < 0.0 {
                roots.push(newton_bisect(g, a, ke));
                roots.push(newton_bisect(g, ke, b));
            } else if g(ke).0.abs() <= 1e-12 * (ke * ke * s).max(1.0) {
                roots.push(ke);
            }
        }
    }
    roots.retain(|&k| k > 0.0 && k <= k_limit);
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(1.0));
    roots
}

fn polish_real(config: &BoxConfig, mut k: f64) -> f64 {
    for _ in 0..50 {
        let (v, d) = real_phase(k, config);
        if d == 0.0 {
            break;
        }
        let dk = v / d;
        k -= dk;
        if dk.abs() <= 4.0 * f64::EPSILON * k.abs() {
            break;
        }
    }
    k
}

/// Removes the `k = 1/|ℓ₂|` travelling mode from `roots` when the box is in
/// the `ℓ₁ = 0` family and that mode is not degenerate with a standing wave.
fn split_plane_wave(config: &BoxConfig, roots: &mut Vec<f64>) -> Option<f64> {
    let b = config.boundary;
    if b.ell1.abs() > TAU_BC || b.ell2 == 0.0 {
        return None;
    }
    let kp = 1.0 / b.ell2.abs();
    let distance_to_standing = (kp * config.length / PI - (kp * config.length / PI).round()).abs();
    if distance_to_standing <= 1e-9 {
        return None;
    }
    if let Some(pos) = roots.iter().position(|&k| (k - kp).abs() <= 1e-8 * kp) {
        return Some(roots.remove(pos));
    }
    Some(polish_real(config, kp))
}

/// The first `n_max` positive real roots with biorthonormal modes.
///
/// Requires `ℓ₁ ≥ 0`, where the real axis carries the whole spectrum.
pub fn solve_real_spectrum(config: &BoxConfig, n_max: usize) -> Result<Spectrum> {
    if config.boundary.ell1 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "real-axis search needs ell1 >= 0, got {}",
            config.boundary.ell1
        )));
    }
    let k_limit = (n_max as f64 + 2.0) * PI / config.length;
    let mut roots = real_roots(config, k_limit);
    let plane = split_plane_wave(config, &mut roots);
    if roots.len() < n_max {
        return Err(Error::BracketFailure { found: roots.len(), wanted: n_max, k_limit });
    }
    roots.truncate(n_max);
    let modes = roots
        .iter()
        .enumerate()
        .map(|(i, &k)| Mode::unnormalized(config, i + 1, Complex64::new(k, 0.0)))
        .collect();
    let plane_wave_mode = plane.map(|k| Mode::unnormalized(config, 0, Complex64::new(k, 0.0)));
    normalize_biorthogonal(&Spectrum { config: *config, modes, broken: false, plane_wave_mode })
}

/// Recomputes `N` and `Ñ` of every mode from its wavenumber.
pub fn normalize_biorthogonal(spectrum: &Spectrum) -> Result<Spectrum> {
    let config = &spectrum.config;
    let modes = spectrum
        .modes
        .iter()
        .map(|m| Mode::new(config, m.n, m.k))
        .collect::<Result<Vec<_>>>()?;
    let plane_wave_mode = match &spectrum.plane_wave_mode {
        Some(m) => Some(Mode::new(config, m.n, m.k)?),
        None => None,
    };
    let broken = modes.iter().any(|m| !m.is_real());
    Ok(Spectrum { config: *config, modes, broken, plane_wave_mode })
}

/// Standing waves of the `ℓ₁ = 0` box in closed form:
/// `k_n = nπ/L`, `ψ_n = N_n[sin k_n x + ik_nℓ₂ cos k_n x]`,
/// `N_n = √(2/L)/|1 − k_n²ℓ₂²|^{1/2}`, `Ñ_n = −sgn(k_n²ℓ₂² − 1) N_n`.
pub fn closed_form_modes(config: &BoxConfig, n_max: usize) -> Result<Spectrum> {
    let ell1 = config.boundary.ell1;
    if ell1 != 0.0 {
        return Err(Error::NotMaximallyNonHermitian(ell1));
    }
    let l = config.length;
    let l2 = config.boundary.ell2;
    let mut modes = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let k = n as f64 * PI / l;
        let gap = 1.0 - k * k * l2 * l2;
        if gap.abs() < CATASTROPHE_TOL {
            return Err(Error::CatastrophePoint { n, ratio: gap.abs() });
        }
        let norm = (2.0 / l).sqrt() / gap.abs().sqrt();
        let sgn = (k * k * l2 * l2 - 1.0).signum();
        let kl = k * l2;
        modes.push(Mode {
            n,
            k: Complex64::new(k, 0.0),
            energy: Complex64::new(0.5 * k * k, 0.0),
            coeff_a: Complex64::new(0.0, 0.5 * norm * (kl - 1.0)),
            coeff_b: Complex64::new(0.0, 0.5 * norm * (kl + 1.0)),
            norm: Complex64::new(norm, 0.0),
            adjoint_norm: Complex64::new(-sgn * norm, 0.0),
            pt_eigenvalue: Some(if n % 2 == 1 { 1 } else { -1 }),
            length: l,
        });
    }
    Ok(Spectrum { config: *config, modes, broken: false, plane_wave_mode: None })
}

/// Zeros of `f` inside a rectangle of the complex `k` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRoots {
    /// Sorted by `Re k`, then `Im k`.
    pub roots: Vec<Complex64>,
    /// Winding number of the region boundary.
    pub winding: usize,
    /// Index pairs `(i, j)` with `Im roots[i] > 0` and `roots[j] ≈ roots[i]*`.
    pub conjugate_pairs: Vec<(usize, usize)>,
    /// Largest `|f(−k*)|/scale` over off-axis roots; `−k*` lies in the left
    /// half-plane, outside a region restricted to `Re k > 0`.
    pub reflected_residual: f64,
}

impl ComplexRoots {
    pub fn off_axis(&self) -> impl Iterator<Item = &Complex64> {
        self.roots.iter().filter(|k| is_off_axis(**k))
    }
}

fn is_off_axis(k: Complex64) -> bool {
    k.im.abs() > TAU_K * k.norm().max(1.0)
}

/// All zeros of the cleared residual inside `region`, found by winding
/// counts on subdivided rectangles and Newton polish.
pub fn solve_complex_roots(config: &BoxConfig, region: Rect) -> Result<ComplexRoots> {
    if region.on_boundary(Complex64::new(0.0, 0.0), 0.0) {
        return Err(Error::InvalidParameter("k = 0 lies on the region boundary".into()));
    }
    let f = |k: Complex64| residual_and_derivative(k, config);
    let set = zeros_in_rect(&f, region, ContourOptions::default())?;
    let mut roots: Vec<Complex64> = set
        .zeros
        .iter()
        .map(|&k| if is_off_axis(k) { k } else { Complex64::new(polish_real(config, k.re), 0.0) })
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let mut conjugate_pairs = Vec::new();
    let mut reflected_residual: f64 = 0.0;
    for (i, k) in roots.iter().enumerate() {
        if !is_off_axis(*k) {
            continue;
        }
        let mirror = -k.conj();
        reflected_residual = reflected_residual.max(quantization_residual(mirror, config).norm() / residual_scale(mirror, config));
        if k.im > 0.0 {
            if let Some(j) = roots.iter().position(|z| (z - k.conj()).norm() <= 1e-8 * k.norm().max(1.0)) {
                conjugate_pairs.push((i, j));
            }
        }
    }
    Ok(ComplexRoots { roots, winding: set.winding, conjugate_pairs, reflected_residual })
}

/// Every mode whose wavenumber lies inside `region`, real or complex.
pub fn spectrum_in_region(config: &BoxConfig, region: Rect) -> Result<Spectrum> {
    let found = solve_complex_roots(config, region)?;
    let mut roots = found.roots;
    let mut real: Vec<f64> = roots.iter().filter(|k| !is_off_axis(**k)).map(|k| k.re).collect();
    let plane = split_plane_wave(config, &mut real).filter(|kp| region.contains(Complex64::new(*kp, 0.0), 0.0));
    if let Some(kp) = plane {
        roots.retain(|k| is_off_axis(*k) || (k.re - kp).abs() > 1e-8 * kp);
    }
    let modes = roots.iter().enumerate().map(|(i, &k)| Mode::unnormalized(config, i + 1, k)).collect();
    let plane_wave_mode = plane.map(|k| Mode::unnormalized(config, 0, Complex64::new(k, 0.0)));
    normalize_biorthogonal(&Spectrum { config: *config, modes, broken: false, plane_wave_mode })
}

fn check_domain(mode: &Mode, x: f64) -> Result<()> {
    let slack = 1e-12 * mode.length;
    if !(x >= -slack && x <= mode.length + slack) {
        return Err(Error::OutOfDomain { x, length: mode.length });
    }
    Ok(())
}

/// `ψ(x) = A e^{ikx} + B e^{−ikx}` on `[0, L]`.
pub fn eigenfunction_eval(mode: &Mode, x: f64) -> Result<Complex64> {
    check_domain(mode, x)?;
    Ok(mode.value(x))
}

/// Adjoint eigenfunction on `[0, L]`; for `ℓ₁ = 0` this is
/// `Ñ_n[sin k_n x − ik_nℓ₂ cos k_n x]`.
pub fn adjoint_eigenfunction_eval(mode: &Mode, x: f64) -> Result<Complex64> {
    check_domain(mode, x)?;
    Ok(mode.adjoint_value(x))
}

/// `x ↦ ψ*(L − x)`.
pub fn pt_image(mode: &Mode) -> impl Fn(f64) -> Complex64 + Clone + '_ {
    move |x| mode.value(mode.length - x).conj()
}

/// `x ↦ f*(L − x)` for an arbitrary function on `[0, L]`.
pub fn pt_image_of<F: Fn(f64) -> Complex64>(f: F, length: f64) -> impl Fn(f64) -> Complex64 {
    move |x| f(length - x).conj()
}
