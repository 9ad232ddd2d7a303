//! `ptbox`: spectra, inner products, variational extrema, double-barrier
//! sweeps and similarity kernels of the PT-symmetric box.

mod commands;
mod config;
mod dto;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Map;

use commands::Failure;
use config::{merge, read_file, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "ptbox", version, about = "PT-symmetric particle in a box")]
struct Cli {
    /// Flat JSON config; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: .]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "PTBOX_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct BoxArgs {
    #[arg(long = "L")]
    length: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    ell1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    ell2: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues and mode profiles.
    Spectrum {
        #[command(flatten)]
        geometry: BoxArgs,
        /// Number of real modes.
        #[arg(long)]
        n: Option<usize>,
        /// Search re_min,re_max,im_min,im_max of the complex k plane instead.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        complex_region: Option<Vec<f64>>,
        #[arg(long)]
        profile_points: Option<usize>,
    },
    /// Biorthogonal, PT and CPT Gram matrices.
    Inner {
        #[command(flatten)]
        geometry: BoxArgs,
        /// Gram matrix size.
        #[arg(long)]
        gram: Option<usize>,
        /// Modes kept in the C operator.
        #[arg(long)]
        c_terms: Option<usize>,
    },
    /// Stationary points of the PT functional for a seeded matrix.
    Variational {
        /// Block size; the matrix is 2n by 2n.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        coupling: Option<f64>,
    },
    /// Double-barrier transmission sweep and lineshape fit.
    Scatter {
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        k_min: Option<f64>,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        fit_min: Option<f64>,
        #[arg(long)]
        fit_max: Option<f64>,
    },
    /// Similarity kernel K on a grid, its remainder bound and a non-locality witness.
    Kernel {
        #[arg(long = "L")]
        length: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        ell2: Option<f64>,
        /// Series truncation.
        #[arg(long)]
        terms: Option<usize>,
        /// Grid points per axis.
        #[arg(long)]
        points: Option<usize>,
        /// split or direct.
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        witness: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Spectrum { .. } => "spectrum",
            Self::Inner { .. } => "inner",
            Self::Variational { .. } => "variational",
            Self::Scatter { .. } => "scatter",
            Self::Kernel { .. } => "kernel",
        }
    }

    fn overrides(&self) -> Overrides {
        let mut o = Overrides::default();
        let geometry = |o: &mut Overrides, g: &BoxArgs| {
            o.set("L", g.length).set("ell1", g.ell1).set("ell2", g.ell2);
        };
        match self {
            Self::Spectrum { geometry: g, n, complex_region, profile_points } => {
                geometry(&mut o, g);
                o.set("n", *n).set("complex_region", complex_region.clone()).set("profile_points", *profile_points);
            }
            Self::Inner { geometry: g, gram, c_terms } => {
                geometry(&mut o, g);
                o.set("gram", *gram).set("c_terms", *c_terms);
            }
            Self::Variational { n, seed, coupling } => {
                o.set("n", *n).set("seed", *seed).set("coupling", *coupling);
            }
            Self::Scatter { rho, mu, theta, phi, delta, k_min, k_max, steps, fit_min, fit_max } => {
                o.set("rho", *rho)
                    .set("mu", *mu)
                    .set("theta", *theta)
                    .set("phi", *phi)
                    .set("delta", *delta)
                    .set("k_min", *k_min)
                    .set("k_max", *k_max)
                    .set("steps", *steps)
                    .set("fit_min", *fit_min)
                    .set("fit_max", *fit_max);
            }
            Self::Kernel { length, ell2, terms, points, method, witness } => {
                o.set("L", *length)
                    .set("ell2", *ell2)
                    .set("terms", *terms)
                    .set("points", *points)
                    .set("method", method.clone())
                    .set("witness", witness.then_some(true));
            }
        }
        o
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let name = cli.command.name();
    let file = match &cli.config {
        Some(path) => read_file(path)?,
        None => Map::new(),
    };
    let mut flags = cli.command.overrides();
    flags.set("out", cli.out.as_ref().map(|p| p.to_string_lossy().into_owned()));
    flags.set("jobs", cli.jobs);
    let cfg: RunConfig = merge(name, file, flags.0)?;

    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            return Err(Failure::Config("jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| Failure::Config(format!("cannot start {:?} workers: {e}", cfg.jobs)))?;
    let mut buffer = Vec::new();
    let result = pool.install(|| {
        let sink: &mut dyn Write = &mut buffer;
        match cli.command {
            Command::Spectrum { .. } => commands::spectrum(&cfg, &dir, sink),
            Command::Inner { .. } => commands::inner(&cfg, &dir, sink),
            Command::Variational { .. } => commands::variational(&cfg, &dir, sink),
            Command::Scatter { .. } => commands::scatter(&cfg, &dir, sink),
            Command::Kernel { .. } => commands::kernel(&cfg, &dir, sink),
        }
    });
    stdout.write_all(&buffer).map_err(|e| Failure::Config(format!("cannot write to stdout: {e}")))?;
    result
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code: 0 on success, 2 for configuration errors, 3 for numeric
/// failures.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("ptbox: {}", f.message());
            f.exit_code()
        }
    }
}

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    ExitCode::from(run(std::env::args_os(), &mut stdout.lock()))
}
