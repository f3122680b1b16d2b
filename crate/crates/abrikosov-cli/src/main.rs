mod commands;
mod output;
mod scan;

use std::path::PathBuf;
use std::process::ExitCode;

use abrikosov::{Characteristic, ShapeParameter};
use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "abrikosov", version, about = "Stability functions of Abrikosov vortex lattices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Remainder tolerance for lattice sums.
    #[arg(long, global = true, default_value_t = 1e-6, value_parser = parse_tol)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest admissible |κ² − b| / (κ²[(2κ²−1)β+1]).
    #[arg(long, global = true, default_value_t = abrikosov::stability_functions::DEFAULT_B_RATIO)]
    pub b_ratio: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Map τ into the fundamental domain.
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        tau: ShapeParameter,
    },
    /// γ(τ), or γ_k(τ) when --q is given.
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        tau: ShapeParameter,
        #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
        q: Option<Characteristic>,
    },
    Beta {
        #[arg(long, allow_hyphen_values = true)]
        tau: ShapeParameter,
    },
    KappaC {
        #[arg(long, allow_hyphen_values = true)]
        tau: ShapeParameter,
    },
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        tau: ShapeParameter,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        b: f64,
    },
    /// γ(τ) with the multistart trace.
    Minimize {
        #[arg(long, allow_hyphen_values = true)]
        tau: ShapeParameter,
    },
    /// Grid scan; ranges are start:stop:step.
    Scan {
        #[arg(long, value_parser = scan::parse_range, allow_hyphen_values = true)]
        re: scan::Range,
        #[arg(long, value_parser = scan::parse_range)]
        im: scan::Range,
        /// Sidecar for resuming; defaults to OUT.ckpt when --out is set.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Bisect for the sign change of γ along a vertical or horizontal line.
    Zeroset {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "im")]
        re: Option<f64>,
        #[arg(long)]
        im: Option<f64>,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        bracket: (f64, f64),
    },
    /// Symmetry, critical-point and oracle checks.
    Audit {
        #[arg(long, default_value = "0.5+0.8660254037844386i", allow_hyphen_values = true)]
        tau: ShapeParameter,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Galerkin convergence table against μ±.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        tau: ShapeParameter,
        #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
        q: Characteristic,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.08,0.04,0.02")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 6)]
        landau: usize,
        #[arg(long, default_value_t = 3)]
        shells: usize,
    },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v >= 1e-12) {
        return Err("tolerance must be at least 1e-12".into());
    }
    Ok(v)
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated numbers")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_q(s: &str) -> Result<Characteristic, String> {
    parse_pair(s).map(|(a, b)| Characteristic::new(a, b))
}

/// Failure with its process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<abrikosov::Error> for Failure {
    fn from(e: abrikosov::Error) -> Self {
        let code = match e {
            abrikosov::Error::Tolerance { .. } => 3,
            abrikosov::Error::Domain(_) => 2,
            abrikosov::Error::Bracket { .. } => 6,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 4, message: format!("I/O error: {e}") }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure { code: 4, message: format!("I/O error: {e}") }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { code: 1, message: e.to_string() })?;
    }
    let g = &cli.global;
    let report = match cli.command {
        Command::Reduce { tau } => commands::reduce(&tau)?,
        Command::Gamma { tau, q } => commands::gamma(&tau, q.as_ref(), g)?,
        Command::Beta { tau } => commands::beta(&tau, g)?,
        Command::KappaC { tau } => commands::kappa_c(&tau, g)?,
        Command::Classify { tau, kappa, b } => commands::classify(&tau, kappa, b, g)?,
        Command::Minimize { tau } => commands::minimize(&tau, g)?,
        Command::Scan { re, im, checkpoint } => {
            return scan::run(&re, &im, checkpoint, g);
        }
        Command::Zeroset { re, im, bracket } => commands::zeroset(re, im, bracket, g)?,
        Command::Audit { tau, samples } => {
            let (report, all_pass) = commands::audit(&tau, samples, g)?;
            output::emit(&output::render(&report, g.format)?, g.out.as_deref())?;
            if !all_pass {
                return Err(Failure { code: 5, message: "audit: residuals exceed bounds".into() });
            }
            return Ok(());
        }
        Command::Spectrum { tau, q, kappa, eps, landau, shells } => {
            commands::spectrum(&tau, &q, kappa, &eps, landau, shells, g)?
        }
    };
    output::emit(&output::render(&report, g.format)?, g.out.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
