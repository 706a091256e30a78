//! `nems`: analysis, design and simulation of nonlinearity-engineered
//! multi-loop SQUIDs from the command line.
//!
//! Exit codes: 0 success, 1 a regression report with failing rows,
//! 2 invalid input or a circuit outside its single-well region,
//! 3 numerical failure.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use nems_core::{CircuitSpec, NemsError};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "nems", version, about = "Design and verification toolkit for multi-loop SQUID nonlinearities")]
pub struct Cli {
    /// Output format for every subcommand.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

/// Where a circuit comes from: a compiled-in preset or a JSON file.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct CircuitArg {
    /// Preset name (nems3, nems4, nems5, ats, sts, or table<k>-<column>).
    #[arg(long)]
    pub preset: Option<String>,
    /// Circuit JSON file.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

impl CircuitArg {
    pub fn load(&self) -> anyhow::Result<CircuitSpec> {
        match (&self.preset, &self.circuit) {
            (Some(name), _) => Ok(CircuitSpec::preset(name)?),
            (None, Some(path)) => CircuitSpec::load(path)
                .map_err(|e| anyhow::Error::new(e).context(format!("reading {}", path.display()))),
            (None, None) => Err(anyhow!("either --preset or --circuit is required")),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand, quantize and check a circuit.
    Analyze {
        #[command(flatten)]
        circuit: CircuitArg,
        /// Highest Taylor order.
        #[arg(long, default_value_t = nems_core::DEFAULT_ORDER)]
        order: usize,
        /// Print the coefficients even when the single-well check fails.
        #[arg(long)]
        force: bool,
    },
    /// Solve an inverse design problem.
    Design {
        /// Design problem JSON file.
        #[arg(long, conflicts_with = "canned", required_unless_present = "canned")]
        problem: Option<PathBuf>,
        /// One of the built-in problems: nems3, nems4, nems5.
        #[arg(long)]
        canned: Option<String>,
        /// Also write the realized circuit JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = nems_core::DEFAULT_ORDER)]
        order: usize,
    },
    /// Spectrum along one flux axis.
    Sweep {
        #[command(flatten)]
        circuit: CircuitArg,
        /// Flux axis `phi_e<k>`, with `k` the 1-based branch index.
        #[arg(long)]
        axis: String,
        /// `lo:hi` in radians; defaults to one period from the current bias.
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 41)]
        samples: usize,
        /// Number of excited levels reported.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Grid points of the phase discretization.
        #[arg(long, default_value_t = 1024)]
        points: usize,
    },
    /// Strong-drive corrections at a given drive amplitude.
    Drive {
        #[command(flatten)]
        circuit: CircuitArg,
        /// Drive amplitude ε_d.
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = nems_core::DEFAULT_ORDER)]
        order: usize,
        /// Bias deformation Δφ for the two-photon drive estimate.
        #[arg(long)]
        deform: Option<f64>,
        /// Preset to compare nonlinear dissipation against.
        #[arg(long)]
        against: Option<String>,
    },
    /// Single-well (weakly anharmonic) check.
    WaoCheck {
        #[command(flatten)]
        circuit: CircuitArg,
        /// Exit 0 even when the check fails.
        #[arg(long)]
        force: bool,
    },
    /// Run a Kerr-cat, BPCNOT or four-cat scenario.
    Simulate {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Parameter sweep `path=lo:hi:n`, e.g. `residuals.omega1=0:0.5:6`.
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Compare against the published tables.
    Report {
        /// Table number; all tables when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        table: Option<u8>,
        /// Evaluate this fixture file instead of the compiled-in tables.
        #[arg(long, conflicts_with = "table")]
        fixture: Option<PathBuf>,
    },
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("NEMS_NUM_THREADS") {
        let n: usize =
            v.trim().parse().with_context(|| format!("NEMS_NUM_THREADS must be a positive integer, got '{v}'"))?;
        if n == 0 {
            return Err(anyhow!("NEMS_NUM_THREADS must be a positive integer, got 0"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(n) = cause.downcast_ref::<NemsError>() {
            return if n.is_numerical() { 3 } else { 2 };
        }
    }
    2
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(
                |e| matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe),
            )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| commands::run(&cli));
    match result {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = outcome.output.emit(cli.format, &mut stdout).and_then(|_| Ok(stdout.flush()?)) {
                if broken_pipe(&e) {
                    // The reader went away (e.g. `| head`); that is not our failure.
                    return ExitCode::from(outcome.code);
                }
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
