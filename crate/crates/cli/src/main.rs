//! `freebit`: JSON config in, JSON or CSV report out.
//!
//! Exit status is 0 on success, 1 for usage and validation errors, 2 for
//! internal failures.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{CliError, Context};

#[derive(Parser, Debug)]
#[command(name = "freebit", version, about = "Freestates, toy universal prediction, sophistication and prediction games")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed; overrides any seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Knightian sets of quantum or classical states.
    #[command(subcommand)]
    Freestate(FreestateCmd),
    /// Mixture prediction over the toy machine.
    #[command(subcommand)]
    Solomonoff(SolomonoffCmd),
    /// Complexity of strings and sets, and sophistication.
    #[command(subcommand)]
    Soph(SophCmd),
    /// Prediction games against finite-state subjects.
    #[command(subcommand)]
    Arena(ArenaCmd),
    /// CHSH, room puzzles, Newcomb, causal graphs.
    #[command(subcommand)]
    Gadgets(GadgetsCmd),
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum FreestateCmd {
    /// Extremal probabilities of an effect or event.
    Interval,
    /// Evidence that two freestates differ.
    Witness,
    /// Union of several freestates.
    Or,
    /// Probabilistic mixture of freestates.
    Mix,
    /// Whether two pure states can both be cloned by one unitary.
    CloneCheck,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum SolomonoffCmd {
    /// Next-bit prediction after a history.
    Predict,
    /// Per-step comparison with one hypothesis.
    Regret,
    /// The sequence the mixture predicts worst.
    Diagonal,
    /// Truncated halting probability.
    Omega,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum SophCmd {
    /// Complexity of a string.
    K,
    /// Complexity of a finite set given as a listing.
    Kset,
    /// Sophistication of a string, or a table over all strings of some widths.
    Soph,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum ArenaCmd {
    /// Play one predictor against one subject.
    Run,
    /// Classify reference classes against a predictor family.
    Classify,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum GadgetsCmd {
    ChshClassical,
    ChshQuantum,
    Bostrom,
    Newcomb,
    Causal,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Context::new(&cli.common)?;
    let (name, output) = match cli.command {
        Command::Freestate(c) => commands::freestate(c, &ctx)?,
        Command::Solomonoff(c) => commands::solomonoff(c, &ctx)?,
        Command::Soph(c) => commands::soph(c, &ctx)?,
        Command::Arena(c) => commands::arena(c, &ctx)?,
        Command::Gadgets(c) => commands::gadgets(c, &ctx)?,
    };
    ctx.emit(&name, output)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(schema) = e.schema() {
                eprintln!("\nexpected configuration:\n{schema}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
