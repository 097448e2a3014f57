use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

/// Exact Birkhoff sums of step functions over circle rotations.
#[derive(Parser, Debug)]
#[command(name = "rotlab", version, about)]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory [default: $ROTLAB_OUT or ./rotlab-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of iterates the shadow rotation must certify.
    #[arg(long, global = true)]
    horizon: Option<u64>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergents, parities and approximation constants.
    Alpha(AlphaArgs),
    /// Plan, stage laws, sigma_n and Gaussian comparison.
    Experiment,
    /// Run the verification suite; exits 1 on a failed hard check.
    Verify,
    /// Summarize an output directory.
    Report,
}

#[derive(Args, Debug)]
#[group(multiple = false)]
pub struct AlphaSource {
    /// alpha = [0; 1, 1, 1, ...].
    #[arg(long)]
    golden: bool,

    /// Random quotients, e.g. A=5,d=2,seed=1.
    #[arg(long, value_name = "A=..,d=..,seed=..")]
    ead: Option<String>,

    /// Finite list of quotients, e.g. 2,2,2.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    explicit: Option<Vec<u64>>,
}

#[derive(Args, Debug)]
pub struct AlphaArgs {
    #[command(flatten)]
    source: AlphaSource,

    /// Deepest convergent index.
    #[arg(short = 'N', default_value_t = 10)]
    n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let globals = commands::Globals { config: cli.config, out: cli.out, seed: cli.seed, horizon: cli.horizon };
    let result = match cli.cmd {
        Command::Alpha(a) => commands::alpha(&globals, &a),
        Command::Experiment => commands::experiment(&globals),
        Command::Verify => commands::verify(&globals),
        Command::Report => commands::report(&globals),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
