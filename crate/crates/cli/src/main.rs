//! `rsponge`: command-line front end.
//!
//! Exit status is 0 on success, 1 when a verification or search comes out
//! negative, and 2 on usage or input errors.

mod commands;
mod export;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "rsponge", version, about = "Random dyadic sponges, exact subcongruence search and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Strict,
    Relaxed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DisjointArg {
    Closed,
    Interiors,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    MonteCarlo,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Voxel,
    Stl,
}

/// A motion set given as repeated `--motion` values: either 16 row-major
/// matrix entries or 3 translation components, entries like `1`, `-3/2^2`.
#[derive(Args, Clone, Debug)]
pub struct MotionArgs {
    #[arg(long = "motion", value_name = "ENTRIES", num_args = 1, action = clap::ArgAction::Append, allow_hyphen_values = true)]
    pub motions: Vec<String>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check a schedule against the generation conditions.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "strict")]
        mode: ModeArg,
    },
    /// Generate a trace and write it as a directory of DYCX files plus manifest.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
        /// Largest cube count allowed in any complex.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Summarise a DYCX file or re-verify and summarise a trace directory.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exhaustive search for a subcongruent cube.
    DetectSubcongruence {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        scube_level: u32,
        /// Translation grid `2^-R`; defaults to the complex level.
        #[arg(long)]
        resolution: Option<u32>,
        #[arg(long, value_enum, default_value = "closed")]
        disjointness: DisjointArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Safe-cube certificate for a motion set over a trace directory.
    FindSafeCube {
        #[arg(long)]
        trace: PathBuf,
        /// Region to start from; defaults to the unit cube.
        #[arg(long)]
        region: Option<PathBuf>,
        #[command(flatten)]
        motions: MotionArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expansion counterexample for a motion set over a trace directory.
    ExpansionAudit {
        #[arg(long)]
        trace: PathBuf,
        #[command(flatten)]
        motions: MotionArgs,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the two-copy sets X and Y from a trace directory.
    BuildXy {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        step: usize,
        /// Directory for x.dycx, y.dycx and a manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a decomposition file.
    VerifyEquidecomp {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check that B is covered by the images of A.
    VerifyCover {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        motions: MotionArgs,
    },
    /// Probability that the detector fires on a generated complex.
    McProbability {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        scube_level: u32,
        #[arg(long)]
        resolution: u32,
        #[arg(long, value_enum, default_value = "closed")]
        disjointness: DisjointArg,
        #[arg(long, value_enum, default_value = "monte-carlo")]
        method: MethodArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest number of outcomes for exact enumeration.
        #[arg(long, default_value_t = 1 << 25)]
        budget: u64,
    },
    /// Certified per-step logrange increments and bounds.
    BoundsReport {
        #[arg(long)]
        config: PathBuf,
        /// Number of steps to report; defaults to the whole schedule.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Write a complex as a voxel list or an ASCII STL mesh.
    Export {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Outcome of a command that ran to completion.
pub enum Verdict {
    Positive,
    Negative,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(Verdict::Positive) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
