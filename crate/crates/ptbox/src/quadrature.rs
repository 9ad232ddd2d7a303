//! Gauss–Legendre rules and composite integration of oscillatory integrands.
//!
//! Panels hold 16 nodes and are sized so that one wavelength of the fastest
//! oscillation spans four panels (64 nodes). The panel count is doubled until
//! two successive estimates agree to [`REL_TOL`].

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

/// Relative tolerance of [`integrate`].
pub const REL_TOL: f64 = 1e-10;

/// Panels per oscillation wavelength (16 nodes each).
pub const PANELS_PER_WAVELENGTH: f64 = 4.0;

const MAX_DOUBLINGS: u32 = 14;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Tricomi initial guess.
    #[must_use]
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    #[must_use]
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[must_use]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 16-point rule.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Shared 32-point rule.
pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// Number of 16-node panels covering `[a, b]` for wavenumber `k_max`.
#[must_use]
pub fn panel_count(a: f64, b: f64, k_max: f64) -> usize {
    let wavelengths = (b - a).abs() * k_max.abs() / (2.0 * PI);
    ((PANELS_PER_WAVELENGTH * wavelengths).ceil() as usize).max(2)
}

fn composite<F: FnMut(f64) -> Complex64>(a: f64, b: f64, panels: usize, f: &mut F) -> (Complex64, f64) {
    let rule = gl16();
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for (x, w) in rule.nodes().iter().zip(rule.weights()) {
            let v = f(mid + 0.5 * h * x);
            acc += v * (*w * 0.5 * h);
            mass += v.norm() * (*w * 0.5 * h).abs();
        }
    }
    (acc, mass)
}

/// Integrates `f` over `[a, b]`, where `k_max` bounds the fastest
/// oscillation (sum of the wavenumbers of a product integrand).
///
/// Panels are doubled until successive estimates agree to [`REL_TOL`]
/// relative to the integral, or to `1e-14` relative to `∫|f|` when the
/// integral itself cancels to near zero.
pub fn integrate<F: FnMut(f64) -> Complex64>(a: f64, b: f64, k_max: f64, mut f: F) -> Complex64 {
    let mut panels = panel_count(a, b, k_max);
    let (mut prev, _) = composite(a, b, panels, &mut f);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let (next, mass) = composite(a, b, panels, &mut f);
        let diff = (next - prev).norm();
        if diff <= REL_TOL * next.norm() || diff <= 1e-14 * mass {
            return next;
        }
        prev = next;
    }
    prev
}

/// A fixed composite grid, for integrating many products over the same
/// interval without re-deriving nodes.
#[derive(Debug, Clone)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    /// Grid on `[a, b]` resolving wavenumbers up to `k_max`, with the panel
    /// count doubled once beyond the minimum for margin.
    #[must_use]
    pub fn new(a: f64, b: f64, k_max: f64) -> Self {
        let panels = 2 * panel_count(a, b, k_max);
        let rule = gl16();
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * 16);
        let mut weights = Vec::with_capacity(panels * 16);
        for p in 0..panels {
            let mid = a + h * (p as f64 + 0.5);
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        Self { nodes, weights }
    }

    /// `Σ wᵢ f(xᵢ)`.
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(*x) * *w)
            .sum()
    }

    /// `Σ wᵢ uᵢ vᵢ` for pre-sampled values.
    #[must_use]
    pub fn dot(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter()
            .zip(v)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b * *w)
            .sum()
    }

    /// Samples `f` on the nodes.
    pub fn sample<F: FnMut(f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.nodes.iter().copied().map(f).collect()
    }
}
