//! Command-line interface: task generation, evaluation, significance
//! testing and frequency analysis.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod table;

#[derive(Parser)]
#[command(
    name = "sensebench",
    version,
    about = "Word-sense discrimination and phrase-similarity evaluation for additive compositional embedding models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate task files from a sense inventory
    Task {
        #[command(subcommand)]
        command: TaskCommand,
    },
    /// Run an evaluation pipeline
    Eval {
        #[command(subcommand)]
        command: EvalCommand,
    },
    /// Randomized pairwise permutation test between two prediction files
    Significance(SignificanceArgs),
    /// Frequency-band analysis of a task file
    Freq {
        #[command(subcommand)]
        command: FreqCommand,
    },
}

#[derive(Subcommand)]
enum TaskCommand {
    /// Build n-sense discrimination instances with dev/test splits
    Build(TaskBuildArgs),
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Score a word-sense discrimination task file
    Wsd(EvalWsdArgs),
    /// Correlate phrase-pair similarities with human judgments
    Phrase(EvalPhraseArgs),
}

#[derive(Subcommand)]
enum FreqCommand {
    /// Report instances per frequency band; optionally sample balanced bands
    Bands(FreqBandsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PosArg {
    Adjective,
    Noun,
    Verb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EligibilityArg {
    /// Strictly more than n qualifying senses
    MoreThan,
    /// At least n qualifying senses
    AtLeast,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Aligned plain-text table on stdout
    Table,
    /// Line-delimited structured records on stdout
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    /// Single-vector additive composition
    Single,
    /// Multi-sense closest composed sense pair
    Multi,
    /// Multi-sense with pre-supplied sense labels
    MultiOracle,
    /// Word-overlap baseline on context windows
    Overlap,
    /// Uniform random baseline
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OovPolicyArg {
    /// Pick uniformly at random and flag the instance as unscoreable
    Random,
    /// Abort the evaluation
    Fail,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScoreModeArg {
    Single,
    Max,
    Min,
    Mean,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RhoOverArg {
    /// One observation per individual judgment (model score repeated)
    PerJudgment,
    /// One observation per pair against the mean judgment
    PairAverage,
}

#[derive(Args)]
struct TaskBuildArgs {
    /// Sense inventory (JSON document with a "lexemes" array)
    #[arg(long)]
    inventory: String,
    /// Number of senses to discriminate; comma-separated list, each in [2,5]
    #[arg(long, value_delimiter = ',', default_value = "2")]
    n_senses: Vec<u32>,
    /// Restrict to one part of speech
    #[arg(long)]
    pos: Option<PosArg>,
    /// Seed for all sampling
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Fraction of lexemes assigned to the dev split, in (0,1)
    #[arg(long, default_value_t = 0.2)]
    dev_fraction: f64,
    /// Eligibility rule on the number of qualifying senses
    #[arg(long, value_enum, default_value_t = EligibilityArg::MoreThan)]
    eligibility: EligibilityArg,
    /// Instances generated per eligible lexeme
    #[arg(long, default_value_t = 1)]
    repeats: u32,
    /// Directory for wsd_n{n}_{dev,test}.jsonl task files
    #[arg(long)]
    output: String,
    /// Stdout format for the stats summary
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Args)]
struct EvalWsdArgs {
    /// Task file (one instance record per line)
    #[arg(long)]
    task: String,
    /// Prediction strategy
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Word-vector table (required by strategy single)
    #[arg(long)]
    embeddings: Option<String>,
    /// Sense-vector table (required by strategies multi and multi-oracle)
    #[arg(long)]
    sense_embeddings: Option<String>,
    /// Separator between lemma and sense id in sense tokens
    #[arg(long, default_value_t = '%')]
    sense_separator: char,
    /// Sense labels file for multi-oracle: "sentence<TAB>sense_id" lines
    #[arg(long)]
    labels: Option<String>,
    /// Context window: bag-of-words radius 1, 2 or 4, or "dep"
    #[arg(long, default_value = "2")]
    radius: String,
    /// Stop-word list (one token per line); defaults to the bundled
    /// English list
    #[arg(long)]
    stopwords: Option<String>,
    /// Handling of out-of-vocabulary target lemmas
    #[arg(long, value_enum, default_value_t = OovPolicyArg::Random)]
    oov_policy: OovPolicyArg,
    /// Seed for tie-breaking and fallback choices
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Frequency table (token<TAB>count) for a per-band breakdown
    #[arg(long)]
    freq_table: Option<String>,
    /// Write the evaluation report as JSON
    #[arg(long)]
    report: Option<String>,
    /// Write per-instance predictions as line-delimited records
    #[arg(long)]
    predictions: Option<String>,
    /// Worker threads (0 = all cores); results do not depend on this
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Stdout format
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Args)]
struct EvalPhraseArgs {
    /// Judgments file: participant, category, w1, w2, w3, w4, score
    #[arg(long)]
    judgments: String,
    /// Word-vector table (single-sense models)
    #[arg(long)]
    embeddings: Option<String>,
    /// Sense-vector table (multi-sense models)
    #[arg(long)]
    sense_embeddings: Option<String>,
    /// Separator between lemma and sense id in sense tokens
    #[arg(long, default_value_t = '%')]
    sense_separator: char,
    /// Scoring mode; max/min/mean aggregate over sense configurations
    #[arg(long, value_enum, default_value_t = ScoreModeArg::Single)]
    mode: ScoreModeArg,
    /// How observations are formed for the correlation
    #[arg(long, value_enum, default_value_t = RhoOverArg::PerJudgment)]
    rho_over: RhoOverArg,
    /// Write the correlation report as JSON
    #[arg(long)]
    report: Option<String>,
    /// Worker threads (0 = all cores); results do not depend on this
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Stdout format
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Args)]
struct SignificanceArgs {
    /// First prediction file
    #[arg(long)]
    predictions_a: String,
    /// Second prediction file (same task file, same instance order)
    #[arg(long)]
    predictions_b: String,
    /// Permutation rounds
    #[arg(long, default_value_t = 10_000)]
    rounds: u64,
    /// Seed for the swap patterns
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Stdout format
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Args)]
struct FreqBandsArgs {
    /// Task file to analyse
    #[arg(long)]
    task: String,
    /// Frequency table (token<TAB>count)
    #[arg(long)]
    freq_table: String,
    /// Band edges, comma-separated and strictly increasing
    #[arg(long, value_delimiter = ',', default_value = "1,1000,10000,50000,100000")]
    edges: Vec<u64>,
    /// Draw an equal number of instances from every band
    #[arg(long)]
    sample: bool,
    /// Output task file for the balanced sample (with --sample)
    #[arg(long)]
    output: Option<String>,
    /// Seed for band sampling
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Stdout format
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

/// Errors split by exit code: usage problems (1) and data problems (2).
enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Data(err)
    }
}

impl From<sensebench::Error> for CliError {
    fn from(err: sensebench::Error) -> Self {
        CliError::Data(anyhow::Error::new(err))
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Task {
            command: TaskCommand::Build(args),
        } => commands::task_build(args),
        Command::Eval {
            command: EvalCommand::Wsd(args),
        } => commands::eval_wsd(args),
        Command::Eval {
            command: EvalCommand::Phrase(args),
        } => commands::eval_phrase(args),
        Command::Significance(args) => commands::significance(args),
        Command::Freq {
            command: FreqCommand::Bands(args),
        } => commands::freq_bands(args),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            1
        }
        Err(CliError::Data(error)) => {
            eprintln!("error: {error:#}");
            2
        }
    }
}
