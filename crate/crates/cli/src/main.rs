use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permqubo::{Big, Format, Kind, Lambda, Problem, Technique};

mod commands;

/// Exact QUBO/Ising kernels for permutations, placement problems and their solvers.
#[derive(Parser, Debug)]
#[command(name = "permqubo", version)]
struct Cli {
    /// Worker threads for parallel solvers (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    technique: Technique,
    #[arg(long)]
    kind: Kind,
    /// Number of positions.
    #[arg(short)]
    n: usize,
    /// Number of particles (defaults to n).
    #[arg(short)]
    m: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a permutation kernel.
    Kernel {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Output path, `-` for standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print term statistics.
        #[arg(long)]
        stats: bool,
    },
    /// Reduce a problem instance to a placement instance.
    Reduce {
        #[arg(long)]
        problem: Problem,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "AUTO")]
        big: Big,
        #[arg(long)]
        out: PathBuf,
    },
    /// Put a placement instance on top of a kernel.
    Compose {
        #[arg(long)]
        ppp: PathBuf,
        #[arg(long)]
        technique: Technique,
        #[arg(long)]
        kind: Kind,
        #[arg(long, default_value = "AUTO")]
        lambda: Lambda,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimize a model (or, with the oracle, a placement instance).
    Solve {
        #[arg(long, value_enum)]
        solver: SolverName,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        /// Initial temperature; defaults to the largest coefficient magnitude.
        #[arg(long)]
        t_initial: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
        /// Largest model the brute-force solver accepts.
        #[arg(long, default_value_t = permqubo::solvers::DEFAULT_VAR_CAP)]
        max_vars: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print term counts, coefficient sets, diameter and offset of a model.
    Stats {
        #[arg(long)]
        model: PathBuf,
    },
    /// Check a kernel exhaustively against its permutations.
    Verify {
        #[command(flatten)]
        kernel: KernelArgs,
    },
    /// Count quadratic terms of a composed problem without solving it.
    Counts {
        #[arg(long)]
        problem: Problem,
        #[arg(long)]
        technique: Technique,
        #[arg(long, default_value = "qubo")]
        kind: Kind,
        #[arg(long, default_value = "AUTO")]
        lambda: Lambda,
        #[arg(long, default_value = "AUTO")]
        big: Big,
        /// Instance file; otherwise a seeded random instance is generated.
        #[arg(long, conflicts_with_all = ["nodes", "edges", "seed"])]
        input: Option<PathBuf>,
        #[arg(long, required_unless_present = "input")]
        nodes: Option<usize>,
        #[arg(long, default_value_t = 0)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolverName {
    Brute,
    Oracle,
    Sa,
    Exact,
}

/// A bad flag combination or argument value, detected before any work starts.
#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<Invalid>().is_some() { 2 } else { 1 })
        }
    }
}
