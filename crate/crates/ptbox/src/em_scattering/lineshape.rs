//! Double-barrier resonances: closed-form lineshape parameters and their
//! extraction from a swept transmission curve.
//!
//! With `X = sinh²μ cosh²θ` and detuning `q = k − k_c`, near a resonance
//!
//! - `|t|² = 1/(Z² + q²/Q²)`, `Z = (1 − X)/(1 + X)`,
//! - `Q = (1/2δ)(1 + X)/(sinh²θ + X)`,
//! - `Q₂ = (1/2δ)(1 − X)/(sinh θ cosh θ cosh μ)`, `Δ = sinh μ cosh θ/(1 − X)`.
//!
//! These hold with `(θ, φ)` frozen at their resonant values, which becomes
//! exact as the resonance narrows.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::double_barrier::SweepRow;
use super::transfer::{ScatteringMatrix, SlabParams};
use crate::error::{Error, Result};
use crate::lsq::{gauss_newton, LsqOptions, LsqStatus};

/// Even resonances have `e^{i(k_cδ + φ)} = +i`, odd ones `−i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Even => "even",
            Self::Odd => "odd",
        }
    }
}

/// Lineshape parameters of one resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceFit {
    pub k_c: f64,
    /// Half-width scale `Q`.
    pub q: f64,
    /// Inverse square root of the peak transmission.
    pub z: f64,
    /// Fano asymmetry `Δ`.
    pub fano_delta: f64,
    /// Fano slope scale `Q₂`.
    pub q2: f64,
    /// Mean absorbance `ρ` weighting the two reflections.
    pub rho: f64,
    pub parity: Option<Parity>,
    /// RMS transmission misfit relative to the peak; zero for predictions.
    pub residual: f64,
}

impl ResonanceFit {
    /// `q = ∓ΔQ₂`: where `|r_L|²` (left) and `|r_R|²` (right) vanish.
    #[must_use]
    pub fn reflection_zeros(&self) -> (f64, f64) {
        (-self.fano_delta * self.q2, self.fano_delta * self.q2)
    }
}

/// `sin(kδ + φ)`, the sign of `Re(e^{i(kδ + φ)}/i)`, selects the parity.
#[must_use]
pub fn parity_at(p: &SlabParams, delta: f64, k: f64) -> Parity {
    if (k * delta + p.phi).sin() >= 0.0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

fn lowest_resonance(p: &SlabParams, delta: f64, parity: Parity) -> f64 {
    let target = match parity {
        Parity::Even => 0.5 * PI,
        Parity::Odd => 1.5 * PI,
    };
    let mut m = ((p.phi - target) / (2.0 * PI)).floor() + 1.0;
    let mut k = (target - p.phi + 2.0 * PI * m) / delta;
    while k <= 0.0 {
        m += 1.0;
        k = (target - p.phi + 2.0 * PI * m) / delta;
    }
    k
}

/// Closed-form parameters at the lowest positive resonance of the requested
/// parity.
pub fn resonance_predict(p: &SlabParams, delta: f64, parity: Parity) -> Result<ResonanceFit> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("separation must be positive, got {delta}")));
    }
    let (sh_t, ch_t) = (p.theta.sinh(), p.theta.cosh());
    let x = p.mu.sinh().powi(2) * ch_t * ch_t;
    if (1.0 - x).abs() < 1e-10 {
        return Err(Error::DeltaPole(x));
    }
    let barrier = sh_t * sh_t + x;
    if barrier == 0.0 {
        return Err(Error::UnresolvableResonance);
    }
    Ok(ResonanceFit {
        k_c: lowest_resonance(p, delta, parity),
        q: (1.0 + x) / (2.0 * delta * barrier),
        z: (1.0 - x) / (1.0 + x),
        fano_delta: p.mu.sinh() * ch_t / (1.0 - x),
        q2: (1.0 - x) / (2.0 * delta * sh_t * ch_t * p.mu.cosh()),
        rho: p.rho,
        parity: Some(parity),
        residual: 0.0,
    })
}

/// Half-width scale of the exact `|t|²` peak with `(θ, φ)` frozen:
/// `(1 + X)/(2δ cosh θ √(sinh²θ + X))`. Tends to the closed-form `Q` as
/// `θ` grows.
#[must_use]
pub fn exact_width(p: &SlabParams, delta: f64) -> f64 {
    let x = p.mu.sinh().powi(2) * p.theta.cosh().powi(2);
    (1.0 + x) / (2.0 * delta * p.theta.cosh() * (p.theta.sinh().powi(2) + x).sqrt())
}

/// The near-resonance S matrix of the balanced (`μ = 0`) barrier,
/// `e^{2iφ}/(1 − iq/Q) [[1, ∓i(q/Q)/ρ], [∓iρ(q/Q), 1]]`, upper signs for
/// even resonances.
#[must_use]
pub fn balanced_smatrix(rho: f64, phi: f64, q_over_q: f64, parity: Parity) -> ScatteringMatrix {
    let sign = match parity {
        Parity::Even => -1.0,
        Parity::Odd => 1.0,
    };
    let pre = Complex64::from_polar(1.0, 2.0 * phi) / Complex64::new(1.0, -q_over_q);
    let off = Complex64::new(0.0, sign * q_over_q);
    ScatteringMatrix { t_l: pre, t_r: pre, r_l: pre * off * rho, r_r: pre * off / rho }
}

const FIT_ITERATIONS: usize = 100;

fn run_fit<F: Fn(&[f64], &mut [f64])>(r: F, m: usize, x0: &[f64]) -> Result<Vec<f64>> {
    let opts = LsqOptions { max_iter: FIT_ITERATIONS, ..LsqOptions::default() };
    let sol = gauss_newton(r, m, x0, &opts);
    if sol.status == LsqStatus::MaxIterations || !sol.x.iter().all(|v| v.is_finite()) {
        return Err(Error::FitDiverged { iterations: sol.iterations });
    }
    Ok(sol.x)
}

/// Where `t2` crosses `level` walking outward from `peak`, linearly
/// interpolated.
fn half_crossing(ks: &[f64], t2: &[f64], peak: usize, level: f64, step: isize) -> Option<f64> {
    let mut i = peak as isize;
    loop {
        let j = i + step;
        if j < 0 || j as usize >= ks.len() {
            return None;
        }
        let (a, b) = (i as usize, j as usize);
        if t2[b] < level {
            let f = (t2[a] - level) / (t2[a] - t2[b]);
            return Some(ks[a] + f * (ks[b] - ks[a]));
        }
        i = j;
    }
}

/// Fits `|t|² = 1/(Z² + q²/Q²)` over `(k_c, Z, Q)`, then
/// `|r_L|² = ρ²(Δ + q/Q₂)²/(1 + q²/(ZQ)²)` and
/// `|r_R|² = ρ⁻²(−Δ + q/Q₂)²/(1 + q²/(ZQ)²)` jointly over `(ρ, Δ, Q₂)`.
///
/// Rows outside `window = (k_min, k_max)` and pole rows are ignored. The
/// window must contain exactly one transmission maximum above half the
/// largest value.
pub fn fit_lineshape(rows: &[SweepRow], window: (f64, f64)) -> Result<ResonanceFit> {
    let pts: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| !r.pole && r.k >= window.0 && r.k <= window.1 && r.t2.is_finite())
        .collect();
    if pts.len() < 7 {
        return Err(Error::InvalidParameter(format!("window holds {} usable rows, need at least 7", pts.len())));
    }
    let ks: Vec<f64> = pts.iter().map(|r| r.k).collect();
    let t2: Vec<f64> = pts.iter().map(|r| r.t2).collect();
    let rl: Vec<f64> = pts.iter().map(|r| r.rl2).collect();
    let rr: Vec<f64> = pts.iter().map(|r| r.rr2).collect();
    let n = ks.len();

    let top = t2.iter().copied().fold(f64::MIN, f64::max);
    let maxima: Vec<usize> = (1..n - 1)
        .filter(|&i| t2[i] > t2[i - 1] && t2[i] >= t2[i + 1] && t2[i] >= 0.5 * top)
        .collect();
    let peak = match maxima.as_slice() {
        [] => return Err(Error::InvalidParameter("window contains no transmission maximum".into())),
        [p] => *p,
        many => return Err(Error::MultiplePeaks { count: many.len() }),
    };

    let z0 = 1.0 / t2[peak].sqrt();
    let half = 0.5 * t2[peak];
    let sides: Vec<f64> = [half_crossing(&ks, &t2, peak, half, -1), half_crossing(&ks, &t2, peak, half, 1)]
        .into_iter()
        .flatten()
        .map(|k| (k - ks[peak]).abs())
        .collect();
    let hw = if sides.is_empty() { 0.25 * (ks[n - 1] - ks[0]) } else { sides.iter().sum::<f64>() / sides.len() as f64 };
    let scale = t2[peak];

    let trans = |x: &[f64], out: &mut [f64]| {
        let (kc, z, q) = (x[0], x[1], x[2]);
        for i in 0..n {
            let d = ks[i] - kc;
            out[i] = (1.0 / (z * z + d * d / (q * q)) - t2[i]) / scale;
        }
    };
    let x = run_fit(trans, n, &[ks[peak], z0, hw / z0])?;
    let (k_c, z, q) = (x[0], x[1].abs(), x[2].abs());
    let mut misfit = vec![0.0; n];
    trans(&[k_c, z, q], &mut misfit);
    let residual = (misfit.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();

    let zq = z * q;
    let at_centre = (0..n).min_by(|&a, &b| (ks[a] - k_c).abs().total_cmp(&(ks[b] - k_c).abs())).unwrap_or(peak);
    let rl_max = rl.iter().copied().fold(0.0, f64::max);
    let rr_max = rr.iter().copied().fold(0.0, f64::max);
    let rho0 = (rl_max / rr_max).powf(0.25);
    let argmin = |v: &[f64]| (0..n).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0);
    let (zl, zr) = (ks[argmin(&rl)] - k_c, ks[argmin(&rr)] - k_c);
    let d_abs = (rl[at_centre] * rr[at_centre]).sqrt().sqrt();
    let (delta0, q20) = if d_abs > 1e-3 {
        (-zl.signum() * d_abs, 0.5 * (zl.abs() + zr.abs()) / d_abs)
    } else {
        (0.0, q)
    };
    let rscale = rl_max.max(rr_max).max(f64::MIN_POSITIVE);
    let refl = |x: &[f64], out: &mut [f64]| {
        let (rho, delta, q2) = (x[0], x[1], x[2]);
        for i in 0..n {
            let d = ks[i] - k_c;
            let env = 1.0 + d * d / (zq * zq);
            out[i] = (rho * rho * (delta + d / q2).powi(2) / env - rl[i]) / rscale;
            out[n + i] = ((-delta + d / q2).powi(2) / (rho * rho * env) - rr[i]) / rscale;
        }
    };
    let y = run_fit(refl, 2 * n, &[rho0, delta0, q20])?;

    Ok(ResonanceFit {
        k_c,
        q,
        z,
        fano_delta: y[1],
        q2: y[2],
        rho: y[0].abs(),
        parity: None,
        residual,
    })
}
