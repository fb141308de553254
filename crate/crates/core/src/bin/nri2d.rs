use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nri_core::commands::{self, CliError, Outcome};
use nri_core::config::{RunConfig, CONFIG_ENV};

/// Electromagnetic response of a four-level atomic vapor in crossed
/// standing waves.
#[derive(Parser, Debug)]
#[command(name = "nri2d", version)]
struct Cli {
    /// Configuration file (TOML). Defaults to the bundled parameter set.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for map evaluation (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print ε_r, μ_r, n and the polarizabilities at one point as JSON.
    Point {
        /// Position along the coupling wave, in wavelengths.
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Position along the signal wave, in wavelengths.
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        /// Probe detuning in units of gamma_unit.
        #[arg(long = "delta-p", allow_hyphen_values = true)]
        delta_p: Option<f64>,
    },
    /// Write one map as CSV plus a JSON sidecar.
    Map {
        /// Probe detuning in units of gamma_unit.
        #[arg(long = "delta-p", allow_hyphen_values = true)]
        delta_p: Option<f64>,
    },
    /// Write one map per detuning in `sweep.delta_p`.
    Sweep,
    /// Extract contours of Re(n) and fit the innermost one.
    Contours {
        /// Contour level of Re(n). Defaults to `analysis.level`.
        #[arg(long, allow_hyphen_values = true)]
        level: Option<f64>,
        /// Probe detuning in units of gamma_unit.
        #[arg(long = "delta-p", allow_hyphen_values = true)]
        delta_p: Option<f64>,
    },
    /// Compare closed-form and linear-solve amplitudes on random draws.
    Check {
        /// Number of random parameter draws.
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        /// Seed of the random stream.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let out = cli.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    match &cli.command {
        Command::Point { x, y, delta_p } => commands::point(&cfg, *x, *y, *delta_p),
        Command::Map { delta_p } => commands::map(&cfg, *delta_p, &out),
        Command::Sweep => commands::sweep(&cfg, &out),
        Command::Contours { level, delta_p } => commands::contours(&cfg, *level, *delta_p, &out),
        Command::Check { draws, seed } => commands::check(&cfg, *draws, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("warning: could not configure thread pool: {e}");
        }
    }
    let code = match run(&cli) {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome.record).expect("json values serialize"));
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
