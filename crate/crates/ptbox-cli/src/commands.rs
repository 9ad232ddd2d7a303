//! One runner per subcommand. Runners validate, call into `ptbox` and write
//! the results; they do no numerics of their own.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use ptbox::em_scattering::{fit_lineshape, parity_at, transmission_sweep, DoubleBarrier, SlabParams};
use ptbox::inner_products::{biorthogonal_gram, cpt_gram, identity_deviation, pt_gram, CKernelTruncation, DEFAULT_C_TERMS};
use ptbox::kernel_maps::{k2_bound, kernel_grid, nonlocality_report, KernelBox, KernelMethod, DEFAULT_TERMS};
use ptbox::roots::Rect;
use ptbox::spectrum::{solve_real_spectrum, spectrum_in_region, BoxConfig};
use ptbox::variational::{
    dense_spectrum, extremize, random_pt_hamiltonian, unclassified_eigenvalues, ConstraintClass, ExtremizeOptions,
};

use crate::config::{require, RunConfig};
use crate::dto::{ClassDto, FitDto, InnerDto, KernelDto, ModeDto, SpectrumDto, VariationalDto, WitnessDto};

/// Exit 2 for `Config`, 3 for `Numeric`.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Numeric(m) => m,
        }
    }
}

/// Parameter errors from the library are configuration errors; anything
/// else is a numeric failure.
fn lib(op: &'static str) -> impl Fn(ptbox::Error) -> Failure {
    move |e| match e {
        ptbox::Error::InvalidParameter(_) | ptbox::Error::OutOfDomain { .. } => Failure::Config(format!("{op}: {e}")),
        _ => Failure::Numeric(format!("{op}: {e}")),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::write(dir.join(name), contents)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", dir.join(name).display())))
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Numeric(format!("serialize {name}: {e}")))?;
    text.push('\n');
    write_file(dir, name, &text)
}

fn say(stdout: &mut dyn Write, line: &str) -> Result<(), Failure> {
    writeln!(stdout, "{line}").map_err(|e| Failure::Config(format!("cannot write to stdout: {e}")))
}

fn gram_csv(g: &[Vec<Complex64>]) -> String {
    let mut s = String::from("n,m,re,im\n");
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{}", i + 1, j + 1, num(v.re), num(v.im));
        }
    }
    s
}

fn box_config(cmd: &'static str, cfg: &RunConfig) -> Result<BoxConfig, Failure> {
    let l = require(cmd, "L", cfg.length)?;
    let ell1 = require(cmd, "ell1", cfg.ell1)?;
    let ell2 = require(cmd, "ell2", cfg.ell2)?;
    BoxConfig::new(l, ell1, ell2).map_err(lib("BoxConfig::new"))
}

pub fn spectrum(cfg: &RunConfig, dir: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let config = box_config("spectrum", cfg)?;
    let spec = match &cfg.complex_region {
        Some(r) => {
            let [a, b, c, d] = r[..] else {
                return Err(Failure::Config(format!("complex_region needs 4 numbers, got {}", r.len())));
            };
            let rect = Rect::new(a, b, c, d).map_err(lib("Rect::new"))?;
            spectrum_in_region(&config, rect).map_err(lib("spectrum_in_region"))?
        }
        None => {
            let n = require("spectrum", "n", cfg.n)?;
            if n == 0 {
                return Err(Failure::Config("spectrum: n must be positive".into()));
            }
            solve_real_spectrum(&config, n).map_err(lib("solve_real_spectrum"))?
        }
    };
    let points = cfg.profile_points.unwrap_or(101);
    if points < 2 {
        return Err(Failure::Config("spectrum: profile_points must be at least 2".into()));
    }

    let l = config.length;
    let mut csv = String::from("x");
    for m in &spec.modes {
        let _ = write!(csv, ",re_psi_{0},im_psi_{0}", m.n);
    }
    csv.push('\n');
    for i in 0..points {
        let x = l * i as f64 / (points - 1) as f64;
        csv.push_str(&num(x));
        for m in &spec.modes {
            let v = m.value(x);
            let _ = write!(csv, ",{},{}", num(v.re), num(v.im));
        }
        csv.push('\n');
    }

    let dto = SpectrumDto {
        length: l,
        ell1: config.boundary.ell1,
        ell2: config.boundary.ell2,
        broken: spec.broken,
        modes: spec.modes.iter().map(ModeDto::from).collect(),
        plane_wave_mode: spec.plane_wave_mode.as_ref().map(ModeDto::from),
    };
    write_json(dir, "spectrum.json", &dto)?;
    write_file(dir, "modes.csv", &csv)?;
    say(stdout, &format!("spectrum: {} modes, broken={}", spec.modes.len(), spec.broken))
}

pub fn inner(cfg: &RunConfig, dir: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let config = box_config("inner", cfg)?;
    let gram = require("inner", "gram", cfg.gram)?;
    let c_terms = cfg.c_terms.unwrap_or(DEFAULT_C_TERMS.max(gram));
    if gram == 0 || c_terms < gram {
        return Err(Failure::Config(format!("inner: need 0 < gram <= c_terms, got gram={gram}, c_terms={c_terms}")));
    }
    let spec = solve_real_spectrum(&config, c_terms).map_err(lib("solve_real_spectrum"))?;
    let trunc = CKernelTruncation::new(&spec, c_terms).map_err(lib("CKernelTruncation::new"))?;
    let bi = biorthogonal_gram(&spec, gram).map_err(lib("biorthogonal_gram"))?;
    let pt = pt_gram(&spec, gram).map_err(lib("pt_gram"))?;
    let cpt = cpt_gram(&trunc, gram).map_err(lib("cpt_gram"))?;

    write_file(dir, "gram_biorthogonal.csv", &gram_csv(&bi))?;
    write_file(dir, "gram_pt.csv", &gram_csv(&pt))?;
    write_file(dir, "gram_cpt.csv", &gram_csv(&cpt))?;
    let dto = InnerDto {
        gram,
        c_terms,
        biorthogonal_deviation: identity_deviation(&bi),
        cpt_deviation: identity_deviation(&cpt),
    };
    write_json(dir, "inner.json", &dto)?;
    say(stdout, &format!("inner: cpt gram max deviation {}", num(dto.cpt_deviation)))
}

pub fn variational(cfg: &RunConfig, dir: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let n = require("variational", "n", cfg.n)?;
    let seed = require("variational", "seed", cfg.seed)?;
    let coupling = cfg.coupling.unwrap_or(0.1);
    let h = random_pt_hamiltonian(n, coupling, seed).map_err(lib("random_pt_hamiltonian"))?;
    let opts = ExtremizeOptions { seed, ..ExtremizeOptions::default() };
    let mut reports = Vec::new();
    let mut classes = Vec::new();
    for (class, name) in ConstraintClass::ALL.into_iter().zip(["positive", "zero", "negative"]) {
        let r = extremize(&h, class, &opts).map_err(lib("extremize"))?;
        classes.push(ClassDto::new(name, &r));
        reports.push(r);
    }
    let unmatched = unclassified_eigenvalues(&h, &reports, 1e-8);
    let dto = VariationalDto {
        n,
        seed,
        coupling,
        classes,
        dense_spectrum: VariationalDto::pairs(&dense_spectrum(&h)),
        unmatched: VariationalDto::pairs(&unmatched),
    };
    write_json(dir, "variational.json", &dto)?;
    let lambdas: Vec<String> = dto.classes.iter().flat_map(|c| c.eigenvalues.iter().map(|&l| num(l))).collect();
    say(stdout, &format!("variational: lambda=[{}] unmatched={}", lambdas.join(","), dto.unmatched.len()))
}

pub fn scatter(cfg: &RunConfig, dir: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cmd = "scatter";
    let slab = SlabParams::new(
        require(cmd, "rho", cfg.rho)?,
        require(cmd, "mu", cfg.mu)?,
        require(cmd, "theta", cfg.theta)?,
        require(cmd, "phi", cfg.phi)?,
    )
    .map_err(lib("SlabParams::new"))?;
    let db = DoubleBarrier::new(slab, require(cmd, "delta", cfg.delta)?).map_err(lib("DoubleBarrier::new"))?;
    let (k_min, k_max) = (require(cmd, "k_min", cfg.k_min)?, require(cmd, "k_max", cfg.k_max)?);
    let steps = require(cmd, "steps", cfg.steps)?;
    if steps < 2 || !(k_min < k_max) {
        return Err(Failure::Config(format!("scatter: empty k grid ({k_min}, {k_max}, {steps} steps)")));
    }
    let grid: Vec<f64> = (0..steps).map(|i| k_min + (k_max - k_min) * i as f64 / (steps - 1) as f64).collect();
    let rows = transmission_sweep(&db, &grid);

    let mut csv = String::from("k,t2,rL2,rR2,aL2,aR2,pole_flag\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            num(r.k),
            num(r.t2),
            num(r.rl2),
            num(r.rr2),
            num(r.al2),
            num(r.ar2),
            u8::from(r.pole)
        );
    }
    write_file(dir, "sweep.csv", &csv)?;
    let poles = rows.iter().filter(|r| r.pole).count();

    let window = (cfg.fit_min.unwrap_or(k_min), cfg.fit_max.unwrap_or(k_max));
    let mut fit = fit_lineshape(&rows, window).map_err(|e| {
        let _ = say(stdout, &format!("scatter: fit failed, poles={poles}"));
        lib("fit_lineshape")(e)
    })?;
    fit.parity = Some(parity_at(&slab, db.delta, fit.k_c));
    let dto = FitDto::from(&fit);
    write_json(dir, "fit.json", &dto)?;
    say(
        stdout,
        &format!(
            "scatter: k_c={} Q={} Z={} Delta={} Q2={} parity={} poles={poles}",
            num(dto.k_c),
            num(dto.q),
            num(dto.z),
            num(dto.delta),
            num(dto.q2),
            dto.parity.unwrap_or("none")
        ),
    )
}

pub fn kernel(cfg: &RunConfig, dir: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let b = KernelBox::new(require("kernel", "L", cfg.length)?, require("kernel", "ell2", cfg.ell2)?)
        .map_err(lib("KernelBox::new"))?;
    let terms = cfg.terms.unwrap_or(DEFAULT_TERMS);
    let points = cfg.points.unwrap_or(50);
    let (method, method_name) = match cfg.method.as_deref().unwrap_or("split") {
        "split" => (KernelMethod::SplitClosed, "split"),
        "direct" => (KernelMethod::DirectSum, "direct"),
        other => return Err(Failure::Config(format!("kernel: method must be split or direct, got {other:?}"))),
    };
    if terms == 0 || points < 2 {
        return Err(Failure::Config("kernel: need terms >= 1 and points >= 2".into()));
    }
    let bound = k2_bound(&b, terms).map_err(lib("k2_bound"))?;
    let grid = kernel_grid(&b, points, terms, method).map_err(lib("kernel_grid"))?;
    let witness = if cfg.witness.unwrap_or(false) {
        Some(nonlocality_report(&b).map_err(lib("nonlocality_report"))?)
    } else {
        None
    };

    let mut csv = String::from("x,x_prime,re,im\n");
    for e in &grid {
        let _ = writeln!(csv, "{},{},{},{}", num(e.x), num(e.x_prime), num(e.value.re), num(e.value.im));
    }
    write_file(dir, "kernel.csv", &csv)?;
    let dto = KernelDto {
        length: b.length,
        ell2: b.ell2,
        terms,
        points,
        method: method_name,
        k2_bound: bound,
        witness: witness.as_ref().map(WitnessDto::from),
    };
    write_json(dir, "kernel.json", &dto)?;
    match &dto.witness {
        Some(w) => say(
            stdout,
            &format!(
                "kernel: witness x={} x_prime={} |K1|={} bound={} margin={}",
                num(w.x),
                num(w.x_prime),
                num(w.k1_abs),
                num(w.k2_bound),
                num(w.margin)
            ),
        ),
        None => say(stdout, &format!("kernel: k2 bound {}", num(bound))),
    }
}
