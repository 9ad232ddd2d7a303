//! Finite-dimensional PT variational principle.
//!
//! On `ℂ²ⁿ` with `S = diag(I, −I)` the PT inner product is `(φ, ψ)_PT = φ†Sψ`.
//! A Hamiltonian `h = [[a, ib], [ibᵀ, d]]` with real symmetric `a`, `d` obeys
//! `Sh = h†S`, so `B = ψ†Shψ` is real. Stationary points of
//! `F_B = B − λ(ψ†Sψ − σ)` for a constraint class `σ ∈ {+1, 0, −1}` solve
//! `hψ = λψ`.
//!
//! The stationarity system is solved by damped Newton from seeded random
//! starts; the spectrum of `h` from a dense eigensolver is the reference.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inner_products::SmoothWaveFunction;
use crate::lsq::{gauss_newton, LsqOptions, LsqStatus};
use crate::quadrature::integrate;
use crate::spectrum::BoxConfig;

/// Tolerance on `|ψ†Sψ − σ|` for accepted results.
pub const TAU_CON: f64 = 1e-10;

/// `|Im λ|` above which PT symmetry counts as broken.
pub const TAU_BROKEN: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `S = diag(I_n, −I_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParitySignature {
    pub n: usize,
}

impl ParitySignature {
    #[must_use]
    pub fn dimension(&self) -> usize {
        2 * self.n
    }

    #[must_use]
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dimension()).map(|i| if i < self.n { 1.0 } else { -1.0 }).collect()
    }

    #[must_use]
    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dimension(),
            self.diagonal().into_iter().map(|s| Complex64::new(s, 0.0)),
        ))
    }
}

/// `h = [[a, ib], [ic, d]]` with real blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct PTHamiltonian {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl PTHamiltonian {
    /// Arbitrary real blocks; `c ≠ bᵀ` gives a PT-symmetric but not
    /// PT-self-adjoint matrix.
    pub fn from_blocks(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        for (name, m) in [("a", &a), ("b", &b), ("c", &c), ("d", &d)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "block {name} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if n == 0 {
            return Err(Error::DimensionMismatch("blocks must be non-empty".into()));
        }
        Ok(Self { a, b, c, d })
    }

    #[must_use]
    pub fn signature(&self) -> ParitySignature {
        ParitySignature { n: self.a.nrows() }
    }

    #[must_use]
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let n = self.a.nrows();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = Complex64::new(self.a[(i, j)], 0.0);
                h[(i, j + n)] = I * self.b[(i, j)];
                h[(i + n, j)] = I * self.c[(i, j)];
                h[(i + n, j + n)] = Complex64::new(self.d[(i, j)], 0.0);
            }
        }
        h
    }

    /// `max |c − bᵀ|`.
    #[must_use]
    pub fn self_adjoint_deviation(&self) -> f64 {
        (&self.c - self.b.transpose()).abs().max()
    }

    fn scale(&self) -> f64 {
        self.matrix().norm().max(1.0)
    }
}

/// `[[a, ib], [ibᵀ, d]]`, with `a` and `d` required symmetric so that
/// `Sh = h†S` holds.
pub fn build_pt_hamiltonian(a: DMatrix<f64>, b: DMatrix<f64>, d: DMatrix<f64>) -> Result<PTHamiltonian> {
    let bt = b.transpose();
    let h = PTHamiltonian::from_blocks(a, b, bt, d)?;
    for (name, m) in [("a", &h.a), ("d", &h.d)] {
        if (m - m.transpose()).abs().max() > 1e-12 * m.abs().max().max(1.0) {
            return Err(Error::AsymmetricBlock(name));
        }
    }
    Ok(h)
}

/// A seeded PT-self-adjoint `h` of block size `n`: `a` and `d` symmetric with
/// entries in `[−1, 1]`, `d` shifted up by 6, and `b` uniform in
/// `[−coupling, coupling]`. Small couplings keep the spectrum real.
pub fn random_pt_hamiltonian(n: usize, coupling: f64, seed: u64) -> Result<PTHamiltonian> {
    if n == 0 {
        return Err(Error::DimensionMismatch("blocks must be non-empty".into()));
    }
    if !(coupling.is_finite() && coupling >= 0.0) {
        return Err(Error::InvalidParameter(format!("coupling must be non-negative, got {coupling}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sym = |shift: f64| {
        let r = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&r + r.transpose()) * 0.5 + DMatrix::identity(n, n) * shift
    };
    let a = sym(0.0);
    let d = sym(6.0);
    let b = DMatrix::from_fn(n, n, |_, _| coupling * rng.random_range(-1.0..1.0));
    build_pt_hamiltonian(a, b, d)
}

fn dot_s(s: &[f64], u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    u.iter().zip(v.iter()).zip(s).map(|((a, b), w)| a.conj() * b * *w).sum()
}

/// `B = ψ†Shψ`, with the imaginary part checked against `1e-12‖ψ‖²‖h‖`.
pub fn b_functional(psi: &DVector<Complex64>, h: &PTHamiltonian) -> Result<f64> {
    let deviation = h.self_adjoint_deviation();
    if deviation > 1e-12 * h.scale() {
        return Err(Error::NotSelfAdjoint { deviation });
    }
    let hm = h.matrix();
    if psi.len() != hm.nrows() {
        return Err(Error::DimensionMismatch(format!("psi has {} entries, h is {}", psi.len(), hm.nrows())));
    }
    let b = dot_s(&h.signature().diagonal(), psi, &(&hm * psi));
    let bound = 1e-12 * psi.norm_squared() * h.scale();
    if b.im.abs() > bound {
        return Err(Error::NotSelfAdjoint { deviation: b.im.abs() });
    }
    Ok(b.re)
}

/// `ξ†aξ − η†dη + iξ†bη − iη†bᵀξ` for `ψ = (ξ, η)`.
#[must_use]
pub fn b_functional_components(psi: &DVector<Complex64>, h: &PTHamiltonian) -> Complex64 {
    let n = h.a.nrows();
    let xi = psi.rows(0, n).into_owned();
    let eta = psi.rows(n, n).into_owned();
    let cplx = |m: &DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
    let form = |u: &DVector<Complex64>, m: &DMatrix<f64>, v: &DVector<Complex64>| u.dotc(&(cplx(m) * v));
    form(&xi, &h.a, &xi) - form(&eta, &h.d, &eta) + I * form(&xi, &h.b, &eta) - I * form(&eta, &h.b.transpose(), &xi)
}

/// The normalization `ψ†Sψ = σ` imposed during extremization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintClass {
    Positive,
    Zero,
    Negative,
}

impl ConstraintClass {
    pub const ALL: [ConstraintClass; 3] = [Self::Positive, Self::Zero, Self::Negative];

    #[must_use]
    pub fn value(self) -> f64 {
        match self {
            Self::Positive => 1.0,
            Self::Zero => 0.0,
            Self::Negative => -1.0,
        }
    }
}

/// One stationary point of `F_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremizationResult {
    pub psi: DVector<Complex64>,
    pub lambda: f64,
    pub class: ConstraintClass,
    /// `‖hψ − λψ‖`.
    pub residual: f64,
    /// `ψ†Sψ`.
    pub pt_norm: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ExtremizeOptions {
    pub seed: u64,
    /// Starts per dimension of `h`.
    pub starts_per_dim: usize,
    pub max_newton: usize,
    /// Relative λ tolerance for merging results.
    pub dedup_tol: f64,
}

impl Default for ExtremizeOptions {
    fn default() -> Self {
        Self { seed: 0, starts_per_dim: 20, max_newton: 200, dedup_tol: 1e-8 }
    }
}

/// Distinct stationary points and the starts that failed to converge.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremizeReport {
    pub results: Vec<ExtremizationResult>,
    /// `(start index, error)` for starts that did not reach a stationary point.
    pub failed_starts: Vec<(usize, Error)>,
}

impl ExtremizeReport {
    #[must_use]
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.lambda).collect()
    }
}

struct Solved {
    psi: DVector<Complex64>,
    lambda: Complex64,
    residual: f64,
    norm: f64,
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<Complex64> {
    DVector::from_fn(dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Gershgorin interval containing the real part of every eigenvalue.
fn gershgorin(h: &DMatrix<Complex64>) -> (f64, f64) {
    (0..h.nrows()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        let radius: f64 = (0..h.ncols()).filter(|&j| j != i).map(|j| h[(i, j)].norm()).sum();
        (lo.min(h[(i, i)].re - radius), hi.max(h[(i, i)].re + radius))
    })
}

/// A start vector and an optional initial multiplier.
struct Start {
    psi: DVector<Complex64>,
    shift: Option<f64>,
}

/// Starts whose `ψ†Sψ` sign matches `σ`, scaled onto the constraint surface.
/// Every other start carries a multiplier drawn from the Gershgorin interval,
/// so the first Newton step acts as a shifted inverse iteration and the
/// starts reach every part of the spectrum.
fn starts(h: &DMatrix<Complex64>, s: &[f64], class: ConstraintClass, opts: &ExtremizeOptions) -> Vec<Start> {
    let dim = s.len();
    let (lo, hi) = gershgorin(h);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let count = opts.starts_per_dim * dim;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = random_vector(&mut rng, dim);
        let shift = rng.random_range(lo..=hi);
        let norm = dot_s(s, &v, &v).re;
        let psi = match class {
            ConstraintClass::Zero => v.unscale(v.norm()),
            _ if norm * class.value() > 1e-3 * v.norm_squared() => v.unscale(norm.abs().sqrt()),
            _ => continue,
        };
        out.push(Start { psi, shift: (out.len() % 2 == 1).then_some(shift) });
    }
    out
}

fn pack(psi: &DVector<Complex64>, lambda: Complex64) -> Vec<f64> {
    let mut x: Vec<f64> = psi.iter().map(|z| z.re).collect();
    x.extend(psi.iter().map(|z| z.im));
    x.push(lambda.re);
    x.push(lambda.im);
    x
}

fn unpack(x: &[f64], dim: usize) -> (DVector<Complex64>, Complex64) {
    let psi = DVector::from_fn(dim, |i, _| Complex64::new(x[i], x[dim + i]));
    (psi, Complex64::new(x[2 * dim], x[2 * dim + 1]))
}

/// Damped Newton on `(hψ − λψ, ψ†Sψ − σ, Im(ψ₀†ψ))`, plus `‖ψ‖² − 1` for
/// `σ = 0`.
fn solve_start(
    h: &DMatrix<Complex64>,
    s: &[f64],
    class: ConstraintClass,
    start: &Start,
    opts: &ExtremizeOptions,
) -> Result<Solved> {
    let shift = start.shift;
    let start = &start.psi;
    let dim = s.len();
    let scale = h.norm().max(1.0);
    let sigma = class.value();
    let m = 2 * dim + 2 + usize::from(class == ConstraintClass::Zero);
    let residual = |x: &[f64], out: &mut [f64]| {
        let (psi, lambda) = unpack(x, dim);
        let r = h * &psi - &psi * lambda;
        for i in 0..dim {
            out[i] = r[i].re;
            out[dim + i] = r[i].im;
        }
        out[2 * dim] = dot_s(s, &psi, &psi).re - sigma;
        out[2 * dim + 1] = start.dotc(&psi).im;
        if class == ConstraintClass::Zero {
            out[2 * dim + 2] = psi.norm_squared() - 1.0;
        }
    };
    let lambda0 = match (shift, class) {
        (Some(x), _) => Complex64::new(x, 0.0),
        (None, ConstraintClass::Zero) => start.dotc(&(h * start)) / start.norm_squared(),
        (None, _) => dot_s(s, start, &(h * start)) / sigma,
    };
    let lsq = LsqOptions { max_iter: opts.max_newton, ..LsqOptions::default() };
    let sol = gauss_newton(residual, m, &pack(start, lambda0), &lsq);
    let (psi, lambda) = unpack(&sol.x, dim);
    let eig_residual = (h * &psi - &psi * lambda).norm();
    let norm = dot_s(s, &psi, &psi).re;
    let converged = sol.status != LsqStatus::MaxIterations
        && sol.residual_norm <= 1e-10 * scale * psi.norm().max(1.0)
        && (norm - sigma).abs() < TAU_CON.max(1e-12 * psi.norm_squared());
    if !converged {
        return Err(Error::NoConvergence { iterations: sol.iterations });
    }
    Ok(Solved { psi, lambda, residual: eig_residual, norm })
}

fn run_starts(
    h: &DMatrix<Complex64>,
    s: &[f64],
    class: ConstraintClass,
    opts: &ExtremizeOptions,
) -> Result<ExtremizeReport> {
    let starts = starts(h, s, class, opts);
    let outcomes: Vec<Result<Solved>> = starts.par_iter().map(|st| solve_start(h, s, class, st, opts)).collect();
    let mut results: Vec<ExtremizationResult> = Vec::new();
    let mut failed_starts = Vec::new();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(sol) => {
                if sol.lambda.im.abs() > TAU_BROKEN {
                    return Err(Error::BrokenPt { lambda: sol.lambda });
                }
                let lambda = sol.lambda.re;
                let duplicate = results
                    .iter()
                    .any(|r| (r.lambda - lambda).abs() <= opts.dedup_tol * lambda.abs().max(1.0));
                if !duplicate {
                    results.push(ExtremizationResult {
                        psi: sol.psi,
                        lambda,
                        class,
                        residual: sol.residual,
                        pt_norm: sol.norm,
                    });
                }
            }
            Err(e) => failed_starts.push((idx, e)),
        }
    }
    results.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(ExtremizeReport { results, failed_starts })
}

/// Stationary points of `F_B` for one constraint class.
pub fn extremize(h: &PTHamiltonian, class: ConstraintClass, opts: &ExtremizeOptions) -> Result<ExtremizeReport> {
    let deviation = h.self_adjoint_deviation();
    if deviation > 1e-12 * h.scale() {
        return Err(Error::NotSelfAdjoint { deviation });
    }
    run_starts(&h.matrix(), &h.signature().diagonal(), class, opts)
}

/// Rayleigh extremization of a hermitian matrix: `S = I`, `ψ†ψ = 1`.
pub fn rayleigh_extremize_hermitian(h: &DMatrix<Complex64>, opts: &ExtremizeOptions) -> Result<ExtremizeReport> {
    check_hermitian(h)?;
    run_starts(h, &vec![1.0; h.nrows()], ConstraintClass::Positive, opts)
}

fn check_hermitian(h: &DMatrix<Complex64>) -> Result<()> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!("{}x{} is not a non-empty square matrix", h.nrows(), h.ncols())));
    }
    let deviation = (h - h.adjoint()).norm();
    if deviation > 1e-12 * h.norm().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Eigenvalues of `h` from the real matrix `[[a, b], [−bᵀ, d]]`, which is
/// similar to `h` through `diag(I, −iI)`. Sorted by real, then imaginary part.
#[must_use]
pub fn dense_spectrum(h: &PTHamiltonian) -> Vec<Complex64> {
    let n = h.a.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&h.a);
    m.view_mut((0, n), (n, n)).copy_from(&h.b);
    m.view_mut((n, 0), (n, n)).copy_from(&(-&h.c));
    m.view_mut((n, n), (n, n)).copy_from(&h.d);
    let mut ev: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Eigenvalues of a hermitian matrix, ascending.
pub fn hermitian_spectrum(h: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigenvalues of `h` not reached by any constraint class.
#[must_use]
pub fn unclassified_eigenvalues(h: &PTHamiltonian, reports: &[ExtremizeReport], tol: f64) -> Vec<Complex64> {
    dense_spectrum(h)
        .into_iter()
        .filter(|ev| {
            !reports
                .iter()
                .flat_map(|r| &r.results)
                .any(|r| (ev - r.lambda).norm() <= tol * ev.norm().max(1.0))
        })
        .collect()
}

/// First variation of the box functional at a trial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxVariation {
    /// `−½∫ψ*(L−x)δψ″ − λ∫ψ*(L−x)δψ`.
    pub first_variation: Complex64,
    /// `−½[ψ*(L−x)δψ′ + ψ′*(L−x)δψ]₀ᴸ`.
    pub surface_term: Complex64,
    /// `λ = B/(ψ, ψ)_PT` of the trial.
    pub multiplier: Complex64,
}

/// Variation of `F_B = −½∫ψ*(L−x)ψ″ − λ(∫ψ*(L−x)ψ − 1)` along `δψ`.
///
/// At an eigenmode the bulk terms cancel and the variation reduces to the
/// surface term, which vanishes when `δψ` obeys the same boundary rows.
pub fn box_variational_residual<A, B>(config: &BoxConfig, psi: &A, delta: &B) -> BoxVariation
where
    A: SmoothWaveFunction + ?Sized,
    B: SmoothWaveFunction + ?Sized,
{
    let l = config.length;
    let k2 = 2.0 * psi.wavenumber();
    let kd = psi.wavenumber() + delta.wavenumber();
    let image = |x: f64| psi.eval(l - x).conj();
    let b = integrate(0.0, l, k2, |x| -0.5 * image(x) * psi.second_derivative(x));
    let norm = integrate(0.0, l, k2, |x| image(x) * psi.eval(x));
    let multiplier = b / norm;
    let first_variation = integrate(0.0, l, kd, |x| {
        image(x) * (-0.5 * delta.second_derivative(x) - multiplier * delta.eval(x))
    });
    let at = |x: f64| image(x) * delta.derivative(x) + psi.derivative(l - x).conj() * delta.eval(x);
    BoxVariation { first_variation, surface_term: -0.5 * (at(l) - at(0.0)), multiplier }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner_products::SmoothAnalytic;
    use crate::spectrum::{closed_form_modes, solve_real_spectrum};
    use proptest::prelude::*;
    use rand::Rng;

    fn m(n: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(n, n, v)
    }

    fn random_blocks(seed: u64, n: usize, coupling: f64) -> PTHamiltonian {
        random_pt_hamiltonian(n, coupling, seed).unwrap()
    }

    #[test]
    fn build_examples() {
        let h = build_pt_hamiltonian(m(1, &[2.0]), m(1, &[0.0]), m(1, &[3.0])).unwrap();
        let hm = h.matrix();
        assert_eq!(hm, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]).map(|v| Complex64::new(v, 0.0)));
        assert!((hm.adjoint() - &hm).norm() == 0.0);

        let h = build_pt_hamiltonian(m(1, &[0.0]), m(1, &[1.0]), m(1, &[0.0])).unwrap();
        let s = h.signature().matrix();
        let hm = h.matrix();
        assert_eq!(hm[(0, 1)], I);
        assert_eq!(hm[(1, 0)], I);
        assert_eq!(&s * &hm, hm.adjoint() * &s);

        let h = random_blocks(3, 3, 1.0);
        let s = h.signature().matrix();
        let hm = h.matrix();
        assert!((&s * &hm - hm.adjoint() * &s).norm() < 1e-14);
    }

    #[test]
    fn build_rejects_bad_blocks() {
        assert!(matches!(
            build_pt_hamiltonian(m(2, &[1.0, 0.0, 0.0, 1.0]), m(1, &[0.0]), m(2, &[1.0; 4])),
            Err(Error::DimensionMismatch(_))
        ));
        assert_eq!(
            build_pt_hamiltonian(m(2, &[1.0, 2.0, 0.0, 1.0]), m(2, &[0.0; 4]), m(2, &[1.0; 4])),
            Err(Error::AsymmetricBlock("a"))
        );
    }

    #[test]
    fn b_functional_examples() {
        let h = build_pt_hamiltonian(m(1, &[2.0]), m(1, &[0.0]), m(1, &[3.0])).unwrap();
        let e1 = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(b_functional(&e1, &h).unwrap(), 2.0);

        let h = random_blocks(11, 4, 0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_vector(&mut rng, 8);
        let full = dot_s(&h.signature().diagonal(), &psi, &(h.matrix() * &psi));
        assert!(full.im.abs() < 1e-12 * psi.norm_squared() * h.scale());
        assert!((b_functional_components(&psi, &h) - full).norm() < 1e-12);

        let bad = PTHamiltonian::from_blocks(m(1, &[1.0]), m(1, &[1.0]), m(1, &[2.0]), m(1, &[1.0])).unwrap();
        assert!(matches!(b_functional(&e1, &bad), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn extremize_diagonal() {
        let h = build_pt_hamiltonian(m(1, &[2.0]), m(1, &[0.0]), m(1, &[3.0])).unwrap();
        let opts = ExtremizeOptions::default();
        let pos = extremize(&h, ConstraintClass::Positive, &opts).unwrap();
        assert_eq!(pos.eigenvalues().len(), 1);
        assert!((pos.results[0].lambda - 2.0).abs() < 1e-12);
        assert!(pos.results[0].psi[1].norm() < 1e-12);
        let neg = extremize(&h, ConstraintClass::Negative, &opts).unwrap();
        assert_eq!(neg.eigenvalues().len(), 1);
        assert!((neg.results[0].lambda - 3.0).abs() < 1e-12);
        let e2 = &neg.results[0].psi;
        assert!((b_functional(e2, &h).unwrap() + 3.0).abs() < 1e-10);
        let zero = extremize(&h, ConstraintClass::Zero, &opts).unwrap();
        assert!(zero.results.is_empty());
        assert_eq!(zero.failed_starts.len(), 40);
    }

    #[test]
    fn extremize_matches_dense_oracle() {
        let h = random_blocks(7, 3, 0.3);
        let opts = ExtremizeOptions { seed: 42, ..ExtremizeOptions::default() };
        let mut found: Vec<f64> = Vec::new();
        for class in [ConstraintClass::Positive, ConstraintClass::Negative] {
            let rep = extremize(&h, class, &opts).unwrap();
            for r in &rep.results {
                assert!(r.residual < 1e-8 * h.scale());
                assert!((r.pt_norm - class.value()).abs() < TAU_CON);
            }
            found.extend(rep.eigenvalues());
        }
        found.sort_by(f64::total_cmp);
        let dense = dense_spectrum(&h);
        assert_eq!(found.len(), dense.len());
        for (a, b) in found.iter().zip(&dense) {
            assert!(b.im.abs() < 1e-10);
            assert!((a - b.re).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn broken_pt_is_reported() {
        // [[0, i], [i, 0]] has eigenvalues ±i.
        let h = build_pt_hamiltonian(m(1, &[0.0]), m(1, &[1.0]), m(1, &[0.0])).unwrap();
        let ev = dense_spectrum(&h);
        assert!((ev[0].im.abs() - 1.0).abs() < 1e-12);
        assert!(matches!(
            extremize(&h, ConstraintClass::Zero, &ExtremizeOptions::default()),
            Err(Error::BrokenPt { .. })
        ));
    }

    #[test]
    fn rayleigh_examples() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(2.0)]);
        let rep = rayleigh_extremize_hermitian(&h, &ExtremizeOptions::default()).unwrap();
        assert_eq!(rep.eigenvalues().len(), 2);
        assert!((rep.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!((rep.eigenvalues()[1] - 2.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = DMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let h = (&r + r.adjoint()) * c(0.5);
        let rep = rayleigh_extremize_hermitian(&h, &ExtremizeOptions::default()).unwrap();
        let oracle = hermitian_spectrum(&h).unwrap();
        assert_eq!(rep.eigenvalues().len(), 4);
        for (a, b) in rep.eigenvalues().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10);
        }

        let nh = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(2.0)]);
        assert!(matches!(rayleigh_extremize_hermitian(&nh, &ExtremizeOptions::default()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let h = random_blocks(1, 2, 0.2);
        let opts = ExtremizeOptions { seed: 77, ..ExtremizeOptions::default() };
        let a = extremize(&h, ConstraintClass::Positive, &opts).unwrap();
        let b = extremize(&h, ConstraintClass::Positive, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unclassified_is_empty_when_all_found() {
        let h = random_blocks(2, 2, 0.2);
        let opts = ExtremizeOptions::default();
        let reps: Vec<_> = ConstraintClass::ALL.iter().map(|c| extremize(&h, *c, &opts).unwrap()).collect();
        assert!(unclassified_eigenvalues(&h, &reps, 1e-8).is_empty());
    }

    #[test]
    fn box_variation_at_eigenmode() {
        let config = BoxConfig::new(1.0, 0.0, 0.2).unwrap();
        let s = closed_form_modes(&config, 2).unwrap();
        let v = box_variational_residual(&config, &s.modes[0], &s.modes[1]);
        assert!(v.first_variation.norm() < 1e-7);
        assert!(v.surface_term.norm() < 1e-7);
        assert!((v.multiplier - s.modes[0].energy).norm() < 1e-9);

        let general = BoxConfig::new(1.0, 0.3, 0.4).unwrap();
        let s = solve_real_spectrum(&general, 3).unwrap();
        let v = box_variational_residual(&general, &s.modes[2], &s.modes[0]);
        assert!(v.first_variation.norm() < 1e-7);
    }

    #[test]
    fn box_variation_off_boundary_equals_surface_term() {
        let config = BoxConfig::new(1.0, 0.0, 0.2).unwrap();
        let s = closed_form_modes(&config, 1).unwrap();
        let delta = SmoothAnalytic::new(
            1.0,
            1.0,
            |x| Complex64::new(1.0 + x, 0.0),
            |_| Complex64::new(1.0, 0.0),
            |_| Complex64::new(0.0, 0.0),
        );
        let v = box_variational_residual(&config, &s.modes[0], &delta);
        assert!(v.first_variation.norm() > 1e-3);
        assert!((v.first_variation - v.surface_term).norm() < 1e-7);
    }

    #[test]
    fn box_variation_at_non_eigenfunction() {
        let config = BoxConfig::new(1.0, 0.0, 0.2).unwrap();
        let s = closed_form_modes(&config, 2).unwrap();
        let trial = SmoothAnalytic::new(
            1.0,
            0.0,
            |x| Complex64::new(x * (1.0 - x), 0.0),
            |x| Complex64::new(1.0 - 2.0 * x, 0.0),
            |_| Complex64::new(-2.0, 0.0),
        );
        let v = box_variational_residual(&config, &trial, &s.modes[1]);
        assert!(v.first_variation.norm() > 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn b_is_real(seed in 0u64..1000, n in 1usize..5) {
            let h = random_blocks(seed, n, 1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let psi = random_vector(&mut rng, 2 * n);
            prop_assert!(b_functional(&psi, &h).is_ok());
        }

        #[test]
        fn scaling_scales_multipliers(seed in 0u64..1000, factor in 0.1..10.0f64) {
            let h = random_blocks(seed, 2, 0.2);
            let scaled = build_pt_hamiltonian(&h.a * factor, &h.b * factor, &h.d * factor).unwrap();
            let opts = ExtremizeOptions { seed, starts_per_dim: 5, ..ExtremizeOptions::default() };
            let a = extremize(&h, ConstraintClass::Positive, &opts).unwrap();
            let b = extremize(&scaled, ConstraintClass::Positive, &opts).unwrap();
            prop_assert_eq!(a.results.len(), b.results.len());
            for (x, y) in a.results.iter().zip(&b.results) {
                prop_assert!((x.lambda * factor - y.lambda).abs() < 1e-9 * y.lambda.abs().max(1.0));
                let overlap = x.psi.dotc(&y.psi).norm() / (x.psi.norm() * y.psi.norm());
                prop_assert!((overlap - 1.0).abs() < 1e-8);
            }
        }
    }
}
