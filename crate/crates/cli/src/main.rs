use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lissajous_interp::experiments::{self, ConvergeChecks, Report};

/// Interpolation experiments on Lissajous-Chebyshev nodes.
#[derive(Parser, Debug)]
#[command(name = "lcinterp", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Write the CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Size of the worker pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Node table for one degree pair, with a grid/curve consistency line.
    Nodes {
        #[arg(long)]
        pair: String,
    },
    /// Interpolation error of one corpus function, or its coefficients.
    Interp {
        #[arg(long)]
        id: String,
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Dump the coefficients instead of the error.
        #[arg(long)]
        coeffs: bool,
    },
    /// Error along a degree sequence with a fitted log-log slope.
    Converge {
        /// Corpus id; repeatable.
        #[arg(long = "id", required = true)]
        ids: Vec<String>,
        /// `padua:a..b`, `skew:a..b` or `m,n;m,n;...`
        #[arg(long, default_value = "padua:8..128")]
        seq: String,
        #[arg(long = "p", default_value = "2")]
        ps: Vec<f64>,
        /// Fail unless the slope is at most this; one value, or one per --p.
        #[arg(long = "max-slope", allow_negative_numbers = true)]
        max_slope: Vec<f64>,
        /// Fail unless the last error is below this.
        #[arg(long)]
        max_final_error: Option<f64>,
    },
    /// Lebesgue constants along a degree sequence.
    Lebesgue {
        #[arg(long, default_value = "padua:4..64")]
        seq: String,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Fail unless the normalized last/first ratio is below this.
        #[arg(long, default_value_t = 2.0)]
        max_growth: f64,
    },
    /// Discrete-to-continuous norm ratio bands over random polynomials.
    Mz {
        /// Degree pair; repeatable.
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
        #[arg(long = "p", default_value = "2")]
        ps: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// De la Vallée-Poussin means: kernel table, property check or rate.
    Vdv(VdvArgs),
    /// List the registered test functions.
    Corpus,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct VdvModes {
    /// Dump K_n on a uniform grid.
    #[arg(long)]
    kernel: bool,
    /// Check degree bound, interpolation and reproduction.
    #[arg(long = "check-lemma56")]
    check: bool,
    /// Torus corpus id for a rate experiment.
    #[arg(long)]
    rate: Option<String>,
}

#[derive(Args, Debug)]
struct VdvArgs {
    #[command(flatten)]
    mode: VdvModes,
    /// Values of n; repeatable.
    #[arg(long = "n", default_value = "8")]
    ns: Vec<usize>,
    /// Doubling range `a..b` for the rate experiment.
    #[arg(long = "n-range", default_value = "8..128")]
    n_range: String,
    #[arg(long = "p", default_value = "2")]
    ps: Vec<f64>,
    #[arg(long = "max-slope", allow_negative_numbers = true)]
    max_slope: Vec<f64>,
    #[arg(long, default_value_t = 512)]
    steps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

fn run(command: Command) -> Result<Report> {
    let report = match command {
        Command::Nodes { pair } => experiments::run_nodes(experiments::parse_pair(&pair)?)?,
        Command::Interp { id, pair, p, coeffs } => {
            experiments::run_interp(&id, experiments::parse_pair(&pair)?, p, coeffs)?
        }
        Command::Converge {
            ids,
            seq,
            ps,
            max_slope,
            max_final_error,
        } => {
            let pairs = experiments::parse_sequence(&seq)?;
            let checks = ConvergeChecks {
                max_slope,
                max_final_error,
            };
            experiments::run_converge(&ids, &pairs, &ps, &checks, &seq)?
        }
        Command::Lebesgue { seq, grid, max_growth } => {
            experiments::run_lebesgue(&experiments::parse_sequence(&seq)?, grid, max_growth, &seq)?
        }
        Command::Mz { pairs, ps, trials, seed } => {
            let pairs = pairs
                .iter()
                .map(|s| experiments::parse_pair(s))
                .collect::<Result<Vec<_>, _>>()?;
            experiments::run_mz(&pairs, &ps, trials, seed)?
        }
        Command::Vdv(args) => {
            if args.mode.kernel {
                if args.ns.len() != 1 {
                    bail!("--kernel takes exactly one --n");
                }
                experiments::run_vdv_kernel(args.ns[0], args.steps)?
            } else if args.mode.check {
                experiments::run_vdv_check(&args.ns, args.seed, args.tolerance)?
            } else {
                let id = args.mode.rate.expect("clap enforces one mode");
                let ns = experiments::doubling(&args.n_range)?;
                experiments::run_vdv_rate(&id, &ns, &args.ps, &args.max_slope)?
            }
        }
        Command::Corpus => experiments::run_corpus(),
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let report = run(cli.command)?;
    match &cli.common.out {
        Some(path) => fs::write(path, &report.csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", report.csv),
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    if !report.passed {
        eprintln!("one or more checks failed");
    }
    Ok(report.passed)
}
