use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qpa",
    version,
    about = "Check, run and compile quantum pushdown automata"
)]
pub struct Cli {
    /// Numerical tolerance for well-formedness and matrix checks.
    #[arg(long, global = true, env = "QPA_TOLERANCE", default_value_t = 1e-9)]
    pub tolerance: f64,

    /// Output format.
    #[arg(long, global = true, env = "QPA_OUTPUT", value_enum, default_value_t = OutputMode::Human)]
    pub output: OutputMode,

    /// Shorthand for `--output json`.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn mode(&self) -> OutputMode {
        if self.json {
            OutputMode::Json
        } else {
            self.output
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the well-formedness conditions of a spec.
    Check(CheckArgs),
    /// Run the recognition process on one word.
    Run(RunArgs),
    /// Run every word of a file and write a CSV of results.
    Batch(BatchArgs),
    /// Compile a DFA document into a reversible pushdown automaton.
    CompileDfa(CompileArgs),
    /// Build a truncated evolution matrix and optionally check or dump it.
    Matrix(MatrixArgs),
    /// Shipped automata.
    #[command(subcommand)]
    Zoo(ZooCommand),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Use the simplified suite regardless of the spec's kind.
    #[arg(long, conflicts_with = "general")]
    pub simplified: bool,
    /// Use the general suite regardless of the spec's kind.
    #[arg(long)]
    pub general: bool,
    /// Witnesses printed per failing condition in human mode.
    #[arg(long, default_value_t = 3)]
    pub witnesses: usize,
}

/// `auto` or a step count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxSteps {
    Auto,
    Fixed(usize),
}

impl FromStr for MaxSteps {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(MaxSteps::Auto);
        }
        s.parse()
            .map(MaxSteps::Fixed)
            .map_err(|_| format!("expected `auto` or a step count, got `{s}`"))
    }
}

impl MaxSteps {
    pub fn get(self) -> Option<usize> {
        match self {
            MaxSteps::Auto => None,
            MaxSteps::Fixed(n) => Some(n),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunOptions {
    /// Step limit; `auto` is 20·(|word| + 2).
    #[arg(long, default_value = "auto")]
    pub max_steps: MaxSteps,
    /// Decision cutoff in (0.5, 1]; without it a strict majority decides.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Simulate even if the spec is not well-formed. Amplitude that runs
    /// past the right end-marker is dropped and reported as lost.
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub file: PathBuf,
    pub word: String,
    #[command(flatten)]
    pub run: RunOptions,
    /// Print every step.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug)]
pub struct BatchArgs {
    pub file: PathBuf,
    /// One word per line; an empty line is the empty word.
    pub words: PathBuf,
    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    pub input: PathBuf,
    /// Destination for the compiled spec; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeedArg {
    /// Only the initial configuration.
    Initial,
    /// Every state at every head position with every stack up to
    /// `--stack-depth` symbols above Z0.
    Stacks,
}

#[derive(Args, Debug)]
pub struct MatrixArgs {
    pub file: PathBuf,
    #[arg(long, default_value = "")]
    pub word: String,
    #[arg(long, default_value_t = 4)]
    pub radius: usize,
    #[arg(long, value_enum, default_value_t = SeedArg::Stacks)]
    pub seed: SeedArg,
    /// Stack depth of the `stacks` seed.
    #[arg(long, default_value_t = 2)]
    pub stack_depth: usize,
    /// Largest window allowed.
    #[arg(long, default_value_t = qpa::matrixlab::DEFAULT_WINDOW_CAP)]
    pub cap: usize,
    /// Check interior columns and rows for unitarity.
    #[arg(long)]
    pub verify: bool,
    /// Emit the matrix as JSON triplets.
    #[arg(long)]
    pub dump: bool,
    /// Print the matrix as a text grid (small windows only).
    #[arg(long)]
    pub grid: bool,
    /// Write the dump here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ZooCommand {
    /// Names, sizes and recognition probabilities.
    List,
    /// Write a shipped spec as JSON.
    Export {
        name: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}
