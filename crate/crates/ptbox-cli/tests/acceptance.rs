//! Acceptance checks: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;
use ptbox::em_scattering::{
    double_barrier_transfer, fit_lineshape, params_from_transfer, resonance_predict, smatrix_eigensystem, to_smatrix,
    transfer_from_params, transmission_sweep, DoubleBarrier, Parity, SlabParams,
};
use ptbox::inner_products::{
    biorthogonal_gram, catastrophe_levels, cpt_gram, cpt_inner, identity_deviation, pt_inner, CKernelTruncation,
    ModeSum,
};
use ptbox::kernel_maps::{
    k2_bound, k2_truncated, kernel_k, nonlocality_report, KernelBox, KernelMethod, DEFAULT_TERMS,
};
use ptbox::roots::Rect;
use ptbox::spectrum::{closed_form_modes, solve_complex_roots, solve_real_spectrum, BoxConfig, ComplexRoots, Mode};
use ptbox::variational::{b_functional_components, dense_spectrum, extremize, random_pt_hamiltonian, ConstraintClass, ExtremizeOptions};
use ptbox::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent of the library: `e^{2ikL}D(k) − D(−k)`, `D(k) = 1 + 2ikℓ₁ − k²(ℓ₁² + ℓ₂²)`.
fn residual(k: Complex64, l: f64, l1: f64, l2: f64) -> Complex64 {
    let s = l1 * l1 + l2 * l2;
    let d = |k: Complex64| 1.0 + 2.0 * c(0.0, 1.0) * k * l1 - k * k * s;
    (2.0 * c(0.0, 1.0) * k * l).exp() * d(k) - d(-k)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for l2 in [0.05, 0.1, 0.2] {
        let spec = match solve_real_spectrum(&BoxConfig::new(1.0, 0.0, l2).unwrap(), 20) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("ell2 = {l2}: {e}")),
        };
        for m in &spec.modes {
            worst = worst.max((m.k - m.n as f64 * PI).norm());
        }
    }
    let t = start.elapsed().as_secs_f64();
    outcome(worst < 1e-10 && t < 1.0, format!("max |k_n - n pi| = {worst:.3e} (tol 1e-10), {t:.2} s (limit 1 s)"))
}

/// Retries with a slightly moved upper edge if the contour grazes a zero.
fn roots_in(config: &BoxConfig) -> ptbox::Result<ComplexRoots> {
    let mut last = None;
    for attempt in 0..4 {
        let bump = 0.0137 * attempt as f64;
        let rect = Rect::new(0.1, 20.0 + bump, -5.0 - bump, 5.0 + bump)?;
        match solve_complex_roots(config, rect) {
            Err(e @ Error::ContourOnZero { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

fn grid_oracle_confirms(k: Complex64, l1: f64, l2: f64) -> bool {
    let f = |z: Complex64| residual(z, 1.0, l1, l2).norm();
    let h = 1e-3;
    let mut best = (f(k), c(0.0, 0.0));
    for a in -20..=20 {
        for b in -20..=20 {
            let d = c(a as f64 * h, b as f64 * h);
            if f(k + d) < best.0 {
                best = (f(k + d), d);
            }
        }
    }
    best.1.norm() <= h && best.0 < 1e-8 * (k.norm_sqr() * (l1 * l1 + l2 * l2)).max(1.0)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut off_axis = 0;
    for _ in 0..50 {
        let (l1, l2) = (rng.random_range(0.01..1.0), rng.random_range(-1.0..1.0));
        match roots_in(&BoxConfig::new(1.0, l1, l2).unwrap()) {
            Ok(r) => off_axis += r.off_axis().count(),
            Err(e) => return outcome(false, format!("ell1 = {l1}, ell2 = {l2}: {e}")),
        }
    }
    let mut witness = None;
    for _ in 0..50 {
        let (l1, l2) = (rng.random_range(-1.0..-0.05), rng.random_range(-1.0..1.0));
        let Ok(r) = roots_in(&BoxConfig::new(1.0, l1, l2).unwrap()) else { continue };
        let found = r.conjugate_pairs.iter().map(|&(i, _)| r.roots[i]).find(|k| {
            k.im.abs() > 1e-3 && grid_oracle_confirms(*k, l1, l2) && grid_oracle_confirms(k.conj(), l1, l2)
        });
        if let Some(k) = found {
            let mirror = residual(-k.conj(), 1.0, l1, l2).norm() / (k.norm_sqr() * (l1 * l1 + l2 * l2)).max(1.0);
            if mirror < 1e-8 {
                witness = Some((l1, l2, k));
                break;
            }
        }
    }
    let t = start.elapsed().as_secs_f64();
    let pass = off_axis == 0 && witness.is_some() && t < 60.0;
    let pair = match witness {
        Some((l1, l2, k)) => format!("pair k = {:.6} +/- {:.6}i at ell1 = {l1:.4}, ell2 = {l2:.4}", k.re, k.im.abs()),
        None => "no confirmed pair for ell1 < 0".into(),
    };
    outcome(pass, format!("{off_axis} off-axis roots over 50 samples with ell1 > 0; {pair}; {t:.1} s (limit 60 s)"))
}

fn criterion_3() -> Outcome {
    let spec = solve_real_spectrum(&BoxConfig::new(1.0, 0.0, 0.1).unwrap(), 10).unwrap();
    match biorthogonal_gram(&spec, 10) {
        Ok(g) => {
            let d = identity_deviation(&g);
            outcome(d < 1e-8, format!("max |G - I| = {d:.3e} (tol 1e-8)"))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_4() -> Outcome {
    let (l, l2) = (1.0, 0.1);
    let config = BoxConfig::new(l, 0.0, l2).unwrap();
    let mut worst: f64 = 0.0;
    for n in 1..=10 {
        let k = n as f64 * PI / l;
        let m = Mode::unnormalized(&config, n, c(k, 0.0));
        let want = if n % 2 == 1 { 1.0 } else { -1.0 } * 0.5 * l * (1.0 - k * k * l2 * l2);
        let got = pt_inner(&m, &m).unwrap();
        worst = worst.max((got - want).norm() / want.abs());
    }
    let levels = catastrophe_levels(&config, 10).unwrap();
    let level_err = levels.iter().enumerate().map(|(i, v)| (v - l / (PI * (i + 1) as f64)).abs()).fold(0.0, f64::max);
    let mut detection = true;
    for n in 1..=10 {
        let at = l / (PI * n as f64);
        let fires = matches!(closed_form_modes(&BoxConfig::new(l, 0.0, at).unwrap(), 10), Err(Error::CatastrophePoint { n: m, .. }) if m == n);
        let near = closed_form_modes(&BoxConfig::new(l, 0.0, at * (1.0 + 1e-6)).unwrap(), 10).is_ok();
        detection &= fires && near;
    }
    outcome(
        worst < 1e-8 && level_err < 1e-10 && detection,
        format!(
            "max rel PT-norm error {worst:.3e} (tol 1e-8); catastrophe levels off by {level_err:.1e} (tol 1e-10); detection {}",
            if detection { "fires at every level, silent 1e-6 away" } else { "wrong" }
        ),
    )
}

fn criterion_5() -> Outcome {
    let spec = solve_real_spectrum(&BoxConfig::new(1.0, 0.0, 0.1).unwrap(), 12).unwrap();
    let trunc = CKernelTruncation::new(&spec, 12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..100 {
        let coeffs: Vec<Complex64> = (0..12).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let v = ModeSum { modes: &spec.modes, coeffs };
        let norm = cpt_inner(&v, &v, &trunc).unwrap();
        let scale: f64 = v.coeffs.iter().map(|z| z.norm_sqr()).sum();
        min_ratio = min_ratio.min(norm.re / scale);
    }
    let dev = identity_deviation(&cpt_gram(&trunc, 12).unwrap());
    outcome(
        min_ratio > 0.0 && dev < 1e-6,
        format!("min CPT norm / sum |c|^2 = {min_ratio:.6} (> 0); max |G_CPT - I| = {dev:.3e} (tol 1e-6)"),
    )
}

fn criterion_6() -> Outcome {
    let mut worst_lambda: f64 = 0.0;
    let mut worst_im_b: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for seed in 0..20 {
        let h = random_pt_hamiltonian(4, 0.1, 100 + seed).unwrap();
        let opts = ExtremizeOptions { seed, ..ExtremizeOptions::default() };
        let mut found = Vec::new();
        for class in ConstraintClass::ALL {
            let report = match extremize(&h, class, &opts) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("matrix {seed}: {e}")),
            };
            for r in &report.results {
                let unit = &r.psi / Complex64::from(r.psi.norm());
                worst_im_b = worst_im_b.max(b_functional_components(&unit, &h).im.abs());
                found.push(r.lambda);
            }
        }
        for _ in 0..100 {
            let v = DVector::from_fn(8, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let unit = &v / Complex64::from(v.norm());
            worst_im_b = worst_im_b.max(b_functional_components(&unit, &h).im.abs());
        }
        found.sort_by(f64::total_cmp);
        let dense = dense_spectrum(&h);
        if found.len() != dense.len() {
            return outcome(false, format!("matrix {seed}: {} stationary values for {} eigenvalues", found.len(), dense.len()));
        }
        for (a, b) in found.iter().zip(&dense) {
            worst_lambda = worst_lambda.max((b - a).norm());
        }
    }
    outcome(
        worst_lambda < 1e-10 && worst_im_b < 1e-12,
        format!("max |lambda - dense| = {worst_lambda:.3e} (tol 1e-10); max |Im B| = {worst_im_b:.3e} (tol 1e-12)"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut det, mut parity, mut pt, mut trip): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let p = SlabParams::new(
            rng.random_range(0.5..2.0),
            rng.random_range(-0.5..0.5),
            rng.random_range(0.0..3.0),
            rng.random_range(-PI..PI),
        )
        .unwrap();
        let t = transfer_from_params(p);
        det = det.max((t.det() - 1.0).norm());
        parity = parity.max(t.parity_deviation());
        let db = DoubleBarrier::new(p, rng.random_range(0.1..10.0)).unwrap();
        pt = pt.max(double_barrier_transfer(&db, rng.random_range(0.01..5.0)).pt_deviation());
        match params_from_transfer(&t) {
            Ok(q) => {
                let dphi = (q.phi - p.phi + PI).rem_euclid(2.0 * PI) - PI;
                let e = [q.rho - p.rho, q.mu - p.mu, q.theta - p.theta, dphi].iter().fold(0.0f64, |m, v| m.max(v.abs()));
                trip = trip.max(e);
            }
            Err(e) => return outcome(false, format!("round trip failed: {e}")),
        }
    }
    outcome(
        det < 1e-10 && parity < 1e-10 && pt < 1e-10 && trip < 1e-10,
        format!("max |det - 1| = {det:.1e}, parity {parity:.1e}, |T T* - I| {pt:.1e}, round trip {trip:.1e} (tol 1e-10)"),
    )
}

fn centred_grid(k_c: f64, half_width: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| k_c + half_width * (2.0 * i as f64 / (points - 1) as f64 - 1.0)).collect()
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let (theta, delta) = (3.0f64, 5.0);
    let p = SlabParams::new(1.0, 0.0, theta, 0.0).unwrap();
    let db = DoubleBarrier::new(p, delta).unwrap();
    let k_c = resonance_predict(&p, delta, Parity::Even).unwrap().k_c;
    let rows = transmission_sweep(&db, &centred_grid(k_c, 0.015, 3001));
    let peak = rows.iter().map(|r| r.t2).fold(0.0, f64::max);
    let fit = match fit_lineshape(&rows, (0.0, 1.0)) {
        Ok(f) => f,
        Err(e) => return outcome(false, e.to_string()),
    };
    let want = 2.0 * delta * theta.sinh().powi(2);
    let rel = (1.0 / fit.q / want - 1.0).abs();
    let t = start.elapsed().as_secs_f64();
    outcome(
        (peak - 1.0).abs() < 1e-6 && rel < 0.02 && t < 5.0,
        format!("peak |t|^2 = {peak:.9} (tol 1e-6); 1/Q off by {:.2}% (tol 2%); {t:.2} s (limit 5 s)", 100.0 * rel),
    )
}

fn criterion_9() -> Outcome {
    let rho: f64 = 0.5;
    let (delta, theta) = (5.0, 2.0);
    let p = SlabParams::new(rho, 0.0, theta, 0.0).unwrap();
    let db = DoubleBarrier::new(p, delta).unwrap();
    let pred = resonance_predict(&p, delta, Parity::Even).unwrap();
    let grid = centred_grid(pred.k_c, 20.0 * pred.q, 2001);
    let mut unimodular: f64 = 0.0;
    for &k in &grid {
        let s = to_smatrix(&double_barrier_transfer(&db, k)).unwrap();
        for v in smatrix_eigensystem(&s).values {
            unimodular = unimodular.max((v.norm() - 1.0).abs());
        }
    }
    let rows = transmission_sweep(&db, &grid);
    let near: Vec<_> = rows.iter().filter(|r| (r.k - pred.k_c).abs() <= pred.q).collect();
    let ratio_err = near.iter().map(|r| (r.rr2 / r.rl2 * rho.powi(4) - 1.0).abs()).fold(0.0, f64::max);
    let gain = rows.iter().map(|r| r.ar2).fold(f64::INFINITY, f64::min);
    outcome(
        unimodular < 1e-9 && !near.is_empty() && ratio_err < 0.01 && gain < 0.0,
        format!(
            "max ||z| - 1| = {unimodular:.1e} (tol 1e-9); |rR|^2/|rL|^2 rho^4 off by {:.2e} (tol 1%); min |aR|^2 = {gain:.4}",
            ratio_err
        ),
    )
}

/// Location of the smallest value of `g` on a fine grid around `centre`.
fn argmin(g: impl Fn(f64) -> f64, centre: f64, half_width: f64, points: usize) -> f64 {
    centred_grid(centre, half_width, points)
        .into_iter()
        .map(|k| (g(k), k))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
        .1
}

fn criterion_10() -> Outcome {
    let (delta, theta, rho) = (5.0, 2.0, 0.5);
    let p = SlabParams::new(rho, 0.1, theta, 0.0).unwrap();
    let db = DoubleBarrier::new(p, delta).unwrap();
    let pred = resonance_predict(&p, delta, Parity::Even).unwrap();
    let rows = transmission_sweep(&db, &centred_grid(pred.k_c, 30.0 * pred.q, 6001));
    let peak = rows.iter().map(|r| r.t2).fold(0.0, f64::max);
    let peak_err = (peak * pred.z * pred.z - 1.0).abs();
    let fit = match fit_lineshape(&rows, (0.0, 1.0)) {
        Ok(f) => f,
        Err(e) => return outcome(false, e.to_string()),
    };
    let q_err = (fit.q / pred.q - 1.0).abs();

    let refl = |k: f64| to_smatrix(&double_barrier_transfer(&db, k)).unwrap();
    let q_left = argmin(|k| refl(k).r_l.norm_sqr(), pred.k_c, 3.0 * pred.q, 60_001) - fit.k_c;
    let q_right = argmin(|k| refl(k).r_r.norm_sqr(), pred.k_c, 3.0 * pred.q, 60_001) - fit.k_c;
    let (want_left, want_right) = pred.reflection_zeros();
    let zero_err = ((q_left / want_left - 1.0).abs()).max((q_right / want_right - 1.0).abs());
    let symmetric = (q_left + q_right).abs() <= 0.02 * q_right.abs();
    let depth = refl(fit.k_c + q_left).r_l.norm_sqr() / rows.iter().map(|r| r.rl2).fold(0.0, f64::max);
    let character = symmetric && depth < 1e-6 && fit.residual < 1e-2;

    outcome(
        peak_err < 0.01 && q_err < 0.02 && zero_err < 0.02 && character,
        format!(
            "peak |t|^2 Z^2 - 1 = {peak_err:.2e} (tol 1%); fitted Q = {:.6e} vs {:.6e}, off {:.2}% (tol 2%); \
             zeros at q = {q_left:.4e}, {q_right:.4e} vs {want_left:.4e}, {want_right:.4e}, off {:.1}% (tol 2%); \
             Breit-Wigner residual {:.1e}, Fano zeros {}",
            fit.q,
            pred.q,
            100.0 * q_err,
            100.0 * zero_err,
            fit.residual,
            if symmetric { "symmetric" } else { "asymmetric" }
        ),
    )
}

fn criterion_11() -> Outcome {
    let b = KernelBox::new(1.0, 0.1).unwrap();
    let pairs = [
        (0.1, 0.3),
        (0.15, 0.85),
        (0.2, 0.5),
        (0.25, 0.75),
        (0.3, 0.7),
        (0.35, 0.6),
        (0.45, 0.9),
        (0.55, 0.2),
        (0.65, 0.8),
        (0.9, 0.4),
    ];
    let mut worst: f64 = 0.0;
    for (x, y) in pairs {
        let split = kernel_k(&b, x, y, 2000, KernelMethod::SplitClosed).unwrap().value;
        let direct = kernel_k(&b, x, y, 2000, KernelMethod::DirectSum).unwrap().value;
        worst = worst.max((split - direct).norm());
    }
    let bound = k2_bound(&b, DEFAULT_TERMS).unwrap();
    let mut violations = 0;
    let mut largest: f64 = 0.0;
    for i in 0..50 {
        for j in 0..50 {
            let (x, y) = ((i as f64 + 0.5) / 50.0, (j as f64 + 0.5) / 50.0);
            let v = k2_truncated(&b, x, y, DEFAULT_TERMS).unwrap().norm();
            largest = largest.max(v);
            violations += usize::from(v > bound);
        }
    }
    let witness = nonlocality_report(&b);
    let w = match &witness {
        Ok(w) => format!("witness x = {:.6}, x' = {:.6}, |K1| = {:.3}, margin {:.1}", w.x, w.x_prime, w.k1_abs, w.margin),
        Err(e) => format!("no witness: {e}"),
    };
    outcome(
        worst < 1e-3 && violations == 0 && witness.is_ok(),
        format!("max |K1 closed - Cesaro| = {worst:.2e} (tol 1e-3); {violations} bound violations, max |K2| = {largest:.4} <= {bound:.4}; {w}"),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_ptbox"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("ptbox binary runs");
    (out.status.code(), out.stdout)
}

fn criterion_12() -> Outcome {
    let runs: [&[&str]; 5] = [
        &["spectrum", "--L", "1", "--ell1", "-0.4", "--ell2", "0.3", "--complex-region", "0.1,4.3,-2.1,2.3"],
        &["inner", "--L", "1", "--ell1", "0", "--ell2", "0.1", "--gram", "6", "--c-terms", "8"],
        &["variational", "--n", "3", "--seed", "7"],
        &[
            "scatter", "--rho", "0.5", "--mu", "0.1", "--theta", "2", "--phi", "0", "--delta", "5", "--k-min", "0.29",
            "--k-max", "0.34", "--steps", "2001",
        ],
        &["kernel", "--L", "1", "--ell2", "0.1", "--points", "10", "--witness"],
    ];
    let mut compared = 0;
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let first = run_cli(a.path(), args);
        let second = run_cli(b.path(), args);
        if first.0 != Some(0) || first != second {
            return outcome(false, format!("{} differs or failed (exit {:?})", args[0], first.0));
        }
        let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names {
            let (x, y) = (std::fs::read(a.path().join(&name)).unwrap(), std::fs::read(b.path().join(&name)));
            if y.ok().as_ref() != Some(&x) {
                return outcome(false, format!("{}: {} differs", args[0], name.to_string_lossy()));
            }
            compared += 1;
        }
    }
    outcome(true, format!("5 commands run twice, stdout and {compared} output files byte-identical"))
}

fn main() {
    let start = Instant::now();
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("closed-form spectrum", criterion_1),
        ("reality region", criterion_2),
        ("biorthonormality", criterion_3),
        ("PT inner product", criterion_4),
        ("CPT positivity", criterion_5),
        ("variational equivalence", criterion_6),
        ("transfer-matrix algebra", criterion_7),
        ("unitary resonance", criterion_8),
        ("balanced PT double barrier", criterion_9),
        ("general double barrier", criterion_10),
        ("kernel non-locality", criterion_11),
        ("reproducibility", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of 12 criteria passed in {:.1} s", 12 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
