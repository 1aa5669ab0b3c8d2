//! Command-line front end: argument parsing, precision resolution, and
//! output delivery. All numeric flags are exact rationals (p/q or finite
//! decimals); floating point enters only at rendering time.

use std::path::PathBuf;
use std::process::ExitCode;

use aho2d_core::symcore::IrrepLabel;
use aho2d_core::{rint, Rat};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod exact;

use commands::{cmd_classify, cmd_mpt, cmd_pt1, cmd_rr, cmd_sweep, Failure};
use config::{LevelSelection, OutFormat, RunConfig, SweepSpec};
use exact::parse_exact;

fn irrep_arg(s: &str) -> Result<IrrepLabel, String> {
    s.parse()
        .map_err(|_| format!("unknown irrep {s:?} (expected A1, A2, B1, B2, or E)"))
}

#[derive(Args)]
struct PotentialOpts {
    /// Quartic x^4 coefficient (rational p/q or finite decimal).
    #[arg(long, value_parser = parse_exact, default_value = "0", allow_hyphen_values = true)]
    a: Rat,
    /// Quartic y^4 coefficient.
    #[arg(long, value_parser = parse_exact, default_value = "0", allow_hyphen_values = true)]
    b: Rat,
    /// Half the cross coefficient: the quartic carries 2c x^2 y^2.
    #[arg(long, value_parser = parse_exact, default_value = "0", allow_hyphen_values = true)]
    c: Rat,
}

#[derive(Args)]
struct SolverOpts {
    /// Krylov subspace dimension per symmetry sector.
    #[arg(long, default_value_t = 20)]
    krylov: usize,
    /// Gaussian width of the Krylov seed state.
    #[arg(long, value_parser = parse_exact, default_value = "1", allow_hyphen_values = true)]
    alpha: Rat,
    /// Working precision in bits, at least 128 (falls back to
    /// AHO2D_PRECISION_BITS, then 512).
    #[arg(long)]
    precision: Option<usize>,
}

#[derive(Args)]
struct OutputOpts {
    /// Structured output format (default: plain text; sweep writes CSV).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write the output to PATH instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "aho2d", version, about = "Spectrum toolkit for the 2D quartic anharmonic oscillator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the coupling pattern (a, b, c) and report its symmetry group.
    Classify {
        #[command(flatten)]
        pot: PotentialOpts,
        /// Write the output to PATH instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// First-order perturbation energies in the symmetry-adapted bases.
    Pt1 {
        #[command(flatten)]
        pot: PotentialOpts,
        /// Highest unperturbed level N to expand (E0 = 2(N+1)).
        #[arg(long, default_value_t = 4)]
        nmax: u32,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Rayleigh-Schroedinger series for one state via moment recurrences.
    Mpt {
        #[command(flatten)]
        pot: PotentialOpts,
        /// State label such as 1A1 or 2E (j-th appearance of the irrep).
        #[arg(long)]
        state: String,
        /// Highest series order to solve for.
        #[arg(long, default_value_t = 1)]
        order: u32,
        /// Evaluate the exact partial sum at this coupling.
        #[arg(long, value_parser = parse_exact, allow_hyphen_values = true)]
        lambda: Option<Rat>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Variational Rayleigh-Ritz eigenvalues in one symmetry sector.
    Rr {
        #[command(flatten)]
        pot: PotentialOpts,
        /// Symmetry sector to diagonalize (A1, A2, B1, B2, E).
        #[arg(long, value_parser = irrep_arg)]
        irrep: IrrepLabel,
        /// Coupling strength.
        #[arg(long, value_parser = parse_exact, default_value = "0", allow_hyphen_values = true)]
        lambda: Rat,
        #[command(flatten)]
        solver: SolverOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Track labeled levels across a grid of couplings.
    Sweep {
        #[command(flatten)]
        pot: PotentialOpts,
        /// Coupling grid: a single value or START:STOP:STEP (exact steps).
        #[arg(long, default_value = "0:1:1/20", allow_hyphen_values = true)]
        lambda: String,
        /// Track every labeled level through unperturbed level N.
        #[arg(long, conflicts_with = "state")]
        nmax: Option<u32>,
        /// Comma-separated labels to track instead (e.g. 1A1,2E).
        #[arg(long)]
        state: Option<String>,
        #[command(flatten)]
        solver: SolverOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
}

/// Precedence: --precision flag, then AHO2D_PRECISION_BITS, then 512.
fn resolve_precision(flag: Option<usize>) -> Result<usize, Failure> {
    let bits = match flag {
        Some(b) => b,
        None => match std::env::var("AHO2D_PRECISION_BITS") {
            Ok(text) => text.trim().parse().map_err(|_| {
                Failure::Usage(format!(
                    "AHO2D_PRECISION_BITS must be an integer, got {text:?}"
                ))
            })?,
            Err(_) => 512,
        },
    };
    if bits < 128 {
        return Err(Failure::Usage(format!(
            "precision must be at least 128 bits, got {bits}"
        )));
    }
    Ok(bits)
}

fn pick_format(flag: Option<FormatArg>, default: OutFormat) -> OutFormat {
    match flag {
        Some(FormatArg::Csv) => OutFormat::Csv,
        Some(FormatArg::Json) => OutFormat::Json,
        None => default,
    }
}

fn base_config(pot: PotentialOpts) -> RunConfig {
    RunConfig {
        a: pot.a,
        b: pot.b,
        c: pot.c,
        lambda: None,
        nmax: 4,
        order: 1,
        state: None,
        irrep: None,
        krylov: 20,
        alpha: rint(1),
        precision_bits: 512,
        format: OutFormat::Text,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (text, out) = match cli.cmd {
        Cmd::Classify { pot, out } => {
            let cfg = base_config(pot);
            (cmd_classify(&cfg)?, out)
        }
        Cmd::Pt1 { pot, nmax, output } => {
            let mut cfg = base_config(pot);
            cfg.nmax = nmax;
            cfg.format = pick_format(output.format, OutFormat::Text);
            (cmd_pt1(&cfg)?, output.out)
        }
        Cmd::Mpt { pot, state, order, lambda, output } => {
            let mut cfg = base_config(pot);
            cfg.state = Some(state);
            cfg.order = order;
            cfg.lambda = lambda;
            cfg.format = pick_format(output.format, OutFormat::Text);
            (cmd_mpt(&cfg)?, output.out)
        }
        Cmd::Rr { pot, irrep, lambda, solver, output } => {
            let mut cfg = base_config(pot);
            cfg.irrep = Some(irrep);
            cfg.lambda = Some(lambda);
            cfg.krylov = solver.krylov;
            cfg.alpha = solver.alpha;
            cfg.precision_bits = resolve_precision(solver.precision)?;
            cfg.format = pick_format(output.format, OutFormat::Text);
            (cmd_rr(&cfg)?, output.out)
        }
        Cmd::Sweep { pot, lambda, nmax, state, solver, output } => {
            let mut cfg = base_config(pot);
            cfg.krylov = solver.krylov;
            cfg.alpha = solver.alpha;
            cfg.precision_bits = resolve_precision(solver.precision)?;
            cfg.format = pick_format(output.format, OutFormat::Csv);
            let (start, stop, step) =
                SweepSpec::parse_grid(&lambda).map_err(Failure::Usage)?;
            let selection = match state {
                Some(list) => LevelSelection::Labels(
                    list.split(',').map(|s| s.trim().to_string()).collect(),
                ),
                None => LevelSelection::Nmax(nmax.unwrap_or(4)),
            };
            let spec =
                SweepSpec::new(start, stop, step, selection).map_err(Failure::Usage)?;
            (cmd_sweep(&cfg, &spec)?, output.out)
        }
    };
    deliver(text, out)
}

fn deliver(text: String, out: Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
