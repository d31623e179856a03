//! `graver`: Graver bases, test sets and augmentation from the command line.
//!
//! Exit codes: 0 success, 2 input error, 3 infeasible, 4 verification failure.

mod commands;
mod files;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "graver", version, about = "Exact Graver test sets and augmentation for separable convex integer programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the result here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveFlags {
    /// Cross-check the result against exhaustive enumeration.
    #[arg(long)]
    verify: bool,
    /// Take the largest decrease among all directions at each step.
    #[arg(long)]
    best_improving: bool,
    /// Enforce upper bounds through slack rows `z + s = u`.
    #[arg(long)]
    slack_bounds: bool,
    /// Maximum number of augmentation steps.
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
    /// Emit the trace as JSON lines.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Graver basis of an integer matrix.
    Graver {
        matrix: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// The test set H(A, C).
    Testset {
        a: PathBuf,
        c: PathBuf,
        /// Keep only directions with |t| <= upper (one line of integers).
        #[arg(long)]
        upper: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// The auxiliary matrix A_k.
    Ak {
        a: PathBuf,
        c: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Augment from a feasible start to an optimum.
    Solve {
        instance: PathBuf,
        /// Test set file, or `auto` to compute it from the instance.
        testset: String,
        /// Start point (one line of integers); found by enumeration if omitted.
        start: Option<PathBuf>,
        #[command(flatten)]
        flags: SolveFlags,
        /// Per-coordinate enumeration bound for unbounded variables.
        #[arg(long = "box", default_value_t = 10)]
        box_bound: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Rewrite zᵀQz + cᵀz as a separable objective.
    Quad {
        q: PathBuf,
        /// Linear part (one line of rationals); zero if omitted.
        c: Option<PathBuf>,
        /// Rephrase for 0-1 variables, allowing indefinite Q.
        #[arg(long)]
        binary: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Solve a QAPLIB-format instance with test-set augmentation.
    Qap {
        instance: PathBuf,
        /// Start permutation as 1-based locations, e.g. "2 1 3".
        #[arg(long)]
        start: Option<String>,
        #[command(flatten)]
        flags: SolveFlags,
        #[command(flatten)]
        output: Output,
    },
    /// Solve random instances and compare with exhaustive enumeration.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Graver { matrix, output } => commands::graver(&matrix, output.out.as_deref()),
        Command::Testset { a, c, upper, output } => {
            commands::testset(&a, &c, upper.as_deref(), output.out.as_deref())
        }
        Command::Ak { a, c, k, output } => commands::ak(&a, &c, k, output.out.as_deref()),
        Command::Solve {
            instance,
            testset,
            start,
            flags,
            box_bound,
            output,
        } => commands::solve(
            &instance,
            &testset,
            start.as_deref(),
            &flags.into(),
            box_bound,
            output.out.as_deref(),
        ),
        Command::Quad { q, c, binary, output } => commands::quad(&q, c.as_deref(), binary, output.out.as_deref()),
        Command::Qap {
            instance,
            start,
            flags,
            output,
        } => commands::qap(&instance, start.as_deref(), &flags.into(), output.out.as_deref()),
        Command::Selftest { seed, count } => selftest::run(seed, count),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

impl From<SolveFlags> for commands::Flags {
    fn from(f: SolveFlags) -> Self {
        commands::Flags {
            verify: f.verify,
            best_improving: f.best_improving,
            slack_bounds: f.slack_bounds,
            cap: f.cap,
            json: f.json,
        }
    }
}
