mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use report::Outcome;

#[derive(Parser)]
#[command(
    name = "edgemap",
    version,
    about = "Transgressions, wonderful residues and cone-lemma checks over Q"
)]
struct Cli {
    /// Print the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Record the wall-clock time in the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transgress an invariant polynomial to a Chevalley–Eilenberg class.
    Transgress(TransgressArgs),
    /// Residues on the wonderful compactification.
    #[command(subcommand)]
    Wonderful(WonderfulCommand),
    /// Spectral-sequence checks.
    #[command(subcommand)]
    Ss(SsCommand),
}

#[derive(Args)]
pub struct TransgressArgs {
    /// Lie algebra file: {"labels", "dual_labels", "brackets"}.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    pub algebra: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Polynomial in the dual labels, e.g. "-x^2 - y*z".
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, value_enum, default_value = "lex")]
    pub pivot: Pivot,
    /// Seed for `--pivot shuffle`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Builtin {
    Sl2,
    Sl3,
    Gl2,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Pivot {
    Lex,
    Rev,
    Shuffle,
}

#[derive(Subcommand)]
enum WonderfulCommand {
    /// The class of an invariant polynomial in the boundary presentation.
    Residue(ResidueArgs),
    /// Dimensions of the boundary presentation degree by degree.
    Cokernel(CokernelArgs),
}

#[derive(Args)]
pub struct RootArgs {
    /// Built-in type: A1, A2 or B2.
    #[arg(
        long = "type",
        conflicts_with = "cartan",
        required_unless_present = "cartan"
    )]
    pub type_name: Option<String>,
    /// Root system file: { "rank": l, "cartan": [[...]] }.
    #[arg(long)]
    pub cartan: Option<PathBuf>,
}

#[derive(Args)]
pub struct ResidueArgs {
    #[command(flatten)]
    pub root: RootArgs,
    /// Weyl-invariant polynomial in u1..ul.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, value_enum, default_value = "noneq")]
    pub mode: Mode,
    #[arg(long, default_value_t = edgemap::wonderful::DEFAULT_DEGREE_BOUND)]
    pub degree_bound: usize,
}

#[derive(Args)]
pub struct CokernelArgs {
    #[command(flatten)]
    pub root: RootArgs,
    #[arg(long, value_enum, default_value = "noneq")]
    pub mode: Mode,
    #[arg(long, default_value_t = edgemap::wonderful::DEFAULT_DEGREE_BOUND)]
    pub degree_bound: usize,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    Eq,
    Noneq,
}

#[derive(Subcommand)]
enum SsCommand {
    /// Check the cone lemma on random triples of Q[t]-module complexes.
    VerifyCone(VerifyConeArgs),
}

#[derive(Args)]
pub struct VerifyConeArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Largest term of the random complexes.
    #[arg(long, default_value_t = 4)]
    pub max_dim: usize,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Invariance(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    DegreeBound(String),
    /// The report is still printed before exiting.
    #[error("{failed} of {trials} trials failed")]
    Commutativity {
        failed: usize,
        trials: usize,
        outcome: Box<Outcome>,
    },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invariance(_) => 3,
            CliError::Solver(_) => 4,
            CliError::DegreeBound(_) => 5,
            CliError::Commutativity { .. } => 6,
        }
    }
}

fn emit(outcome: &Outcome, json: bool) {
    if json {
        for line in &outcome.json_lines {
            println!("{line}");
        }
        println!(
            "{}",
            serde_json::to_string(&outcome.report).expect("report serializes")
        );
    } else {
        for line in &outcome.text {
            println!("{line}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let start = Instant::now();
    let result = match &cli.command {
        Command::Transgress(a) => commands::transgress(a, &echo),
        Command::Wonderful(WonderfulCommand::Residue(a)) => commands::residue(a, &echo),
        Command::Wonderful(WonderfulCommand::Cokernel(a)) => commands::cokernel(a, &echo),
        Command::Ss(SsCommand::VerifyCone(a)) => commands::verify_cone(a, &echo),
    };
    let elapsed = start.elapsed().as_millis();
    let finish = |mut outcome: Outcome| {
        if cli.timing {
            outcome.report.timing_ms = Some(elapsed);
            outcome.text.push(format!("time: {elapsed} ms"));
        }
        emit(&outcome, cli.json);
    };
    match result {
        Ok(outcome) => {
            finish(outcome);
            ExitCode::SUCCESS
        }
        Err(CliError::Commutativity {
            failed,
            trials,
            outcome,
        }) => {
            finish(*outcome);
            eprintln!("error: {failed} of {trials} trials failed");
            ExitCode::from(6)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
