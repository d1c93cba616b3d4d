//! `winding`: reproducible experiments on winding-number statistics of the
//! parametric chiral unitary ensemble. Every run writes a CSV table and a
//! JSON sidecar holding the effective configuration.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Settings;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or arguments. Exit code 2.
    Usage(String),
    /// A computation failed. Exit code 3.
    Numerical(String),
    /// Output could not be written. Exit code 1.
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

impl From<chiral_winding::Error> for CliError {
    fn from(e: chiral_winding::Error) -> Self {
        use chiral_winding::Error as E;
        match e {
            E::InvalidArgument(_) | E::UnsupportedSize { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "winding", version, about = "Winding-number statistics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distribution P(W): exact, sampled, and Gaussian approximation.
    Distribution {
        #[command(flatten)]
        common: Common,
    },
    /// Connected correlation functions C_k of the winding number density.
    Corr {
        #[command(flatten)]
        common: Common,
        /// Correlation order (1, 2 or 3).
        #[arg(long)]
        k: Option<usize>,
        /// Separations; each gives the tuple (0, sep, 2 sep, ...).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        sep: Option<Vec<f64>>,
        /// Explicit tuple, comma-separated; repeatable. Overrides --sep.
        #[arg(long, allow_negative_numbers = true)]
        points: Vec<String>,
    },
    /// Rescaled two-point function against its large-N limit.
    Unfold {
        #[command(flatten)]
        common: Common,
        /// Rescaling exponent.
        #[arg(long)]
        alpha: Option<f64>,
        /// Matrix sizes, comma-separated.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long)]
        psi_min: Option<f64>,
        #[arg(long)]
        psi_max: Option<f64>,
        #[arg(long)]
        psi_step: Option<f64>,
    },
    /// Variance of W: closed form, quadrature, asymptotic law.
    Moments {
        #[command(flatten)]
        common: Common,
        /// Rows for N = 1..=n-max.
        #[arg(long)]
        n_max: Option<usize>,
        /// Explicit sizes, comma-separated. Overrides --n-max.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
    },
    /// Winding number density of one sampled field on a uniform grid.
    DensityTrace {
        #[command(flatten)]
        common: Common,
        /// Number of grid points on [0, 2 pi); at least 16.
        #[arg(long)]
        grid_size: Option<usize>,
        /// Use K1 = I, K2 = i I (N = 2) instead of a sampled field.
        #[arg(long)]
        debug_fixed_field: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Matrix size N.
    #[arg(long)]
    n: Option<usize>,
    /// Monte Carlo samples.
    #[arg(long)]
    samples: Option<u64>,
    /// Master seed for all randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "WINDING_WORKERS")]
    workers: Option<usize>,
    /// CSV output path; the sidecar goes to `<out>.json`. Stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file, or a sidecar from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Skip Monte Carlo.
    #[arg(long)]
    analytic_only: bool,
    /// Tolerance for eigenvalues counted as on the unit circle.
    #[arg(long)]
    epsilon_circle: Option<f64>,
    /// Condition number above which a sample is rejected.
    #[arg(long)]
    condition_threshold: Option<f64>,
}

impl Common {
    fn flags(&self) -> Settings {
        Settings {
            n: self.n,
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
            analytic_only: self.analytic_only.then_some(true),
            epsilon_circle: self.epsilon_circle,
            condition_threshold: self.condition_threshold,
            ..Default::default()
        }
    }
}

fn parse_tuple(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad --points value {s:?}: {e}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common, extra) = match cli.command {
        Command::Distribution { common } => ("distribution", common, Settings::default()),
        Command::Corr {
            common,
            k,
            sep,
            points,
        } => {
            let points = if points.is_empty() {
                None
            } else {
                Some(points.iter().map(|s| parse_tuple(s)).collect::<Result<Vec<_>, _>>()?)
            };
            let extra = Settings {
                k,
                sep,
                points,
                ..Default::default()
            };
            ("corr", common, extra)
        }
        Command::Unfold {
            common,
            alpha,
            n_list,
            psi_min,
            psi_max,
            psi_step,
        } => {
            let extra = Settings {
                alpha,
                n_list,
                psi_min,
                psi_max,
                psi_step,
                ..Default::default()
            };
            ("unfold", common, extra)
        }
        Command::Moments {
            common,
            n_max,
            n_list,
        } => {
            let extra = Settings {
                n_max,
                n_list,
                ..Default::default()
            };
            ("moments", common, extra)
        }
        Command::DensityTrace {
            common,
            grid_size,
            debug_fixed_field,
        } => {
            let extra = Settings {
                grid_size,
                debug_fixed_field: debug_fixed_field.then_some(true),
                ..Default::default()
            };
            ("density-trace", common, extra)
        }
    };

    let file = match &common.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let settings = file.overlay(extra.overlay(common.flags()));
    commands::dispatch(name, settings, common.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `winding --help` for usage");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
