//! `permlimit`: command-line front end.
//!
//! Exit status: 0 on success, 1 for invalid input, 2 when a size guard is
//! exceeded, 3 when an internal invariant fails.

mod commands;
mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permlimit::rng::DEFAULT_SEED;
use permlimit::{Error, ErrorKind};

#[derive(Parser, Debug)]
#[command(
    name = "permlimit",
    version,
    about = "Permutation limits: pattern densities, permutons, sampling and distances"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random stream of the run.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Square,
    Infty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Occurrences of a pattern, or the full distribution over S_k with --k.
    Count {
        #[arg(long, required_unless_present = "k")]
        pattern: Option<String>,
        /// Permutation, inline or as a file.
        #[arg(long)]
        perm: String,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Density of a pattern in a permutation or a permuton.
    Density {
        #[arg(long)]
        pattern: String,
        #[arg(long, conflicts_with = "permuton")]
        perm: Option<String>,
        /// `uniform`, inline JSON or a JSON file.
        #[arg(long, required_unless_present = "perm")]
        permuton: Option<String>,
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// A Z-random permutation, or its points with --format csv.
    Sample {
        #[arg(long)]
        permuton: String,
        #[arg(long)]
        n: usize,
    },
    /// Distance between two permutations or permutons.
    Dist {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, value_enum, default_value_t = Metric::Square)]
        metric: Metric,
    },
    /// Discrepancy of a permutation.
    Disc {
        #[arg(long)]
        perm: String,
    },
    /// Step permuton of resolution m approximating a permutation.
    Estimate {
        #[arg(long)]
        perm: String,
        #[arg(long)]
        resolution: usize,
    },
    /// Density trajectories and Cauchy windows along a sequence.
    Converge {
        /// File or generator: constant:<perm>, identity, alternating, nested:<permuton>, zrandom:<permuton>.
        #[arg(long)]
        seq: String,
        /// Patterns separated by `;`, e.g. "2 1;1 2 3".
        #[arg(long)]
        patterns: String,
        /// Comma-separated 1-based indices.
        #[arg(long)]
        indices: String,
        /// Also report tail-window maxima of pairwise d_□ against this threshold.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Concentration of σ(k, Z) around Z.
    Experiment {
        #[arg(long)]
        permuton: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = permlimit::metrics::CONCENTRATION_RESOLUTION)]
        resolution: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Input => 1,
        ErrorKind::Guard => 2,
        ErrorKind::Internal => 3,
    }
}

fn run(cli: Cli) -> permlimit::Result<String> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Internal(e.to_string()))?;
    }
    let g = &cli.global;
    match cli.command {
        Command::Count { pattern, perm, k } => commands::count(g, pattern.as_deref(), &perm, k),
        Command::Density { pattern, perm, permuton, exact, mc, trials } => {
            commands::density(g, &pattern, perm.as_deref(), permuton.as_deref(), exact, mc, trials)
        }
        Command::Sample { permuton, n } => commands::sample(g, &permuton, n),
        Command::Dist { a, b, metric } => commands::dist(g, &a, &b, metric),
        Command::Disc { perm } => commands::disc(g, &perm),
        Command::Estimate { perm, resolution } => commands::estimate(g, &perm, resolution),
        Command::Converge { seq, patterns, indices, epsilon } => {
            commands::converge(g, &seq, &patterns, &indices, epsilon)
        }
        Command::Experiment { permuton, k, trials, resolution } => {
            commands::experiment(g, &permuton, k, trials, resolution)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let output = cli.global.output.clone();
    match run(cli) {
        Ok(text) => {
            let written = match output {
                Some(path) => fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
