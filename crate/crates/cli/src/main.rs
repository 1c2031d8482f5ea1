//! `quadvar`: command-line front end for the verification suites and the variance lab.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Format, Outcome};

/// Exit codes: 0 pass, 1 usage, 2 numeric gate, 3 data gate, 4 config gate.
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NUMERIC: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "quadvar", version, about = "Kloosterman sums, oscillatory identities, Petersson checks and the variance lab")]
struct Cli {
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format; defaults to CSV for grids, JSON for the variance report and text otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Also write the report and a run manifest into this directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical Kloosterman sums S(m, n; c).
    Kloosterman(KloostermanArgs),
    /// Quadratic-polynomial twisted sums and their verification suites.
    Twisted(TwistedArgs),
    /// Residual sweeps for the oscillatory identities.
    Oscillatory(OscillatoryArgs),
    /// Petersson trace formula residual grid after calibrating the harmonic weight.
    Petersson(PeterssonArgs),
    /// Two-route variance experiment.
    Variance(VarianceArgs),
}

#[derive(Args, Debug)]
pub struct KloostermanArgs {
    #[arg(allow_negative_numbers = true)]
    pub m: Option<i64>,
    #[arg(allow_negative_numbers = true)]
    pub n: Option<i64>,
    pub c: Option<u64>,
    /// Exhaustive grid over c <= c-max and 1 <= m, n <= mn-max.
    #[arg(long)]
    pub grid: bool,
    #[arg(long, default_value_t = 100)]
    pub c_max: u64,
    #[arg(long, default_value_t = 10)]
    pub mn_max: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Mult,
    Gauss,
    Vanish,
    Bounds,
}

#[derive(Args, Debug)]
pub struct TwistedArgs {
    /// gamma B C u v c (with --half, gamma and B are the numerators of gamma/2 and B/2).
    #[arg(num_args = 6, allow_negative_numbers = true, value_names = ["GAMMA", "B", "C", "U", "V", "MODULUS"])]
    pub params: Vec<i64>,
    #[arg(long)]
    pub half: bool,
    #[arg(long, value_enum)]
    pub verify: Option<Suite>,
    /// Largest modulus (defaults: mult 200, gauss 99, vanish 60, bounds 100).
    #[arg(long)]
    pub c_max: Option<u64>,
    /// Random cases for the multiplicativity suite.
    #[arg(long, default_value_t = 1000)]
    pub cases: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Random parameter sets per modulus (defaults: vanish 20, gauss 2, bounds 4).
    #[arg(long)]
    pub per_c: Option<u64>,
    /// Exhaustive multiplicativity check up to this modulus.
    #[arg(long, default_value_t = 60)]
    pub exhaustive_c: u64,
    /// Bounds baseline file (JSON with `bound_sup`); the run fails if the supremum grows.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    BesselSum,
    Fresnel,
    Stationary,
    Crg,
}

#[derive(Args, Debug)]
pub struct OscillatoryArgs {
    #[arg(long, value_enum)]
    pub identity: Identity,
    /// Evaluation points (defaults: bessel-sum 0.5,5,50; fresnel 1,10,100; stationary 1e2,1e3,1e4).
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    /// Linear coefficient of the stationary-phase integral.
    #[arg(long, default_value_t = 1.0)]
    pub y: f64,
    /// Window support `lo,hi` replacing the default window.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub support: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [50.0, 100.0, 200.0, 400.0])]
    pub k: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 1, 2, 4])]
    pub r: Vec<u32>,
}

#[derive(Args, Debug)]
pub struct PeterssonArgs {
    /// Level-one weight; taken from the file when importing.
    #[arg(long)]
    pub weight: Option<u32>,
    #[arg(long, default_value_t = 10)]
    pub m_max: u64,
    /// Eigenvalue CSV (`level,weight,n_max` header, then `n,a_n` rows).
    #[arg(long)]
    pub import: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VarianceArgs {
    /// `key = value` configuration file; `QVAR_*` environment variables override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Additional eigenvalue CSV files.
    #[arg(long)]
    pub import: Vec<PathBuf>,
    /// Skip the single-form cancellation profile.
    #[arg(long)]
    pub no_profile: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let start = Instant::now();
    let (name, result) = match &cli.command {
        Command::Kloosterman(a) => ("kloosterman", commands::kloosterman(a)),
        Command::Twisted(a) => ("twisted", commands::twisted(a)),
        Command::Oscillatory(a) => ("oscillatory", commands::oscillatory(a)),
        Command::Petersson(a) => ("petersson", commands::petersson(a)),
        Command::Variance(a) => ("variance", commands::variance(a)),
    };
    let outcome: Outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let format = cli.format.unwrap_or(outcome.default_format);
    match outcome.render(format) {
        Ok(text) => {
            // a closed pipe (e.g. `| head`) is not an error of the run
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if let Some(dir) = &cli.out {
        let args: Vec<String> = std::env::args().skip(1).collect();
        if let Err(e) = outcome.write_artifacts(dir, name, &args, cli.threads, start.elapsed().as_secs_f64()) {
            eprintln!("error: cannot write artifacts to {}: {e}", dir.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        for (check, ok) in &outcome.checks {
            if !ok {
                eprintln!("check failed: {check}");
            }
        }
        ExitCode::from(EXIT_NUMERIC)
    }
}
