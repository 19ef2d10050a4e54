//! Benchmark CLI: reproduce the summary tables, fit noise-ladder rates,
//! audit recorded-run properties, or dump one iteration trace.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hilreg_cli::config::{ExperimentConfig, RateStudyConfig};
use hilreg_cli::{rates, solve, tables, verify, CliError};

#[derive(Parser)]
#[command(
    name = "hilreg",
    about = "Benchmarks for implicit iterative regularization with graded penalties",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Key=value overrides shared by the experiment-shaped subcommands. Values
/// are parsed by the same code that reads config files, so `--seed 1,2,3`
/// and a `seed = 1,2,3` line behave identically.
#[derive(Args, Default)]
struct ExperimentOverrides {
    /// Problem variant: i, ii, or iii
    #[arg(long)]
    variant: Option<String>,
    /// Grid size
    #[arg(long)]
    m: Option<String>,
    /// Relative noise level
    #[arg(long)]
    sigma: Option<String>,
    /// Comma-separated noise seeds
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated method tags (TI/DP, IIM/A1, IIM/GS)
    #[arg(long)]
    method: Option<String>,
    /// Start rule: bound or one
    #[arg(long)]
    start: Option<String>,
    /// Penalty grade s
    #[arg(long)]
    s: Option<String>,
    /// Discrepancy constant C
    #[arg(long = "C")]
    c: Option<String>,
    /// Geometric ratio q
    #[arg(long)]
    q: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<String>,
}

impl ExperimentOverrides {
    fn pairs(&self) -> Vec<(String, String)> {
        let fields = [
            ("variant", &self.variant),
            ("m", &self.m),
            ("sigma", &self.sigma),
            ("seed", &self.seed),
            ("method", &self.method),
            ("start", &self.start),
            ("s", &self.s),
            ("C", &self.c),
            ("q", &self.q),
            ("out", &self.out),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

#[derive(Args, Default)]
struct RateOverrides {
    /// Problem variant: i, ii, or iii
    #[arg(long)]
    variant: Option<String>,
    /// Grid size
    #[arg(long)]
    m: Option<String>,
    /// Comma-separated decreasing noise levels
    #[arg(long)]
    levels: Option<String>,
    /// Comma-separated noise seeds
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated method tags (TI/DP, IIM/A1, IIM/GS)
    #[arg(long)]
    method: Option<String>,
    /// Penalty grade s
    #[arg(long)]
    s: Option<String>,
    /// Discrepancy constant C
    #[arg(long = "C")]
    c: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<String>,
}

impl RateOverrides {
    fn pairs(&self) -> Vec<(String, String)> {
        let fields = [
            ("variant", &self.variant),
            ("m", &self.m),
            ("levels", &self.levels),
            ("seed", &self.seed),
            ("method", &self.method),
            ("s", &self.s),
            ("C", &self.c),
            ("out", &self.out),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the method-comparison sweep and write summary tables
    Tables {
        /// Config file with key = value lines
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: ExperimentOverrides,
    },
    /// Fit error-versus-noise slopes over a ladder of noise levels
    Rates {
        /// Config file with key = value lines
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: RateOverrides,
    },
    /// Audit filter algebra, closed-form agreement, and run structure
    Verify,
    /// Run one method on one noisy instance and dump the trace
    Solve {
        /// Config file with key = value lines
        config: PathBuf,
        #[command(flatten)]
        overrides: ExperimentOverrides,
    },
}

fn dispatch(cmd: &Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Tables { config, overrides } => {
            let cfg = ExperimentConfig::from_sources(config.as_deref(), &overrides.pairs())?;
            tables::cmd_tables(&cfg)
        }
        Cmd::Rates { config, overrides } => {
            let cfg = RateStudyConfig::from_sources(config.as_deref(), &overrides.pairs())?;
            rates::cmd_rates(&cfg)
        }
        Cmd::Verify => verify::cmd_verify(),
        Cmd::Solve { config, overrides } => {
            let cfg = ExperimentConfig::from_sources(Some(config.as_path()), &overrides.pairs())?;
            solve::cmd_solve(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
