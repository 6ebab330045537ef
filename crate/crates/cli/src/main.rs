mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;

/// Question/schema relation matrices and exact-match evaluation for
/// Spider-format text-to-SQL corpora.
#[derive(Parser, Debug)]
#[command(name = "schemalink", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// TOML file with default settings; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Cosine threshold for cosine-match relations
    #[arg(long, global = true)]
    pub tau: Option<f64>,

    /// Disable cosine-match linking
    #[arg(long, global = true)]
    pub no_csr: bool,

    #[arg(long, global = true, value_enum)]
    pub provider: Option<ProviderKind>,

    /// Base URL of the embedding service
    #[arg(long, global = true, env = "EMBED_ENDPOINT")]
    pub endpoint: Option<String>,

    /// Vector file for the file provider
    #[arg(long, global = true)]
    pub vectors: Option<PathBuf>,

    /// Worker threads; 1 runs sequentially
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Tokenization language for questions without pre-split tokens
    #[arg(long, global = true, value_enum)]
    pub language: Option<LanguageArg>,

    /// Compare question spans of up to this many tokens (default: single tokens)
    #[arg(long, global = true)]
    pub span: Option<usize>,

    /// Embed original schema identifiers instead of display names
    #[arg(long, global = true)]
    pub original_names: bool,

    /// More log output (repeatable)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    File,
    Remote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageArg {
    Arabic,
    English,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Corpus statistics and train/test database disjointness
    Stats {
        #[arg(long)]
        schemas: Option<PathBuf>,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
    },
    /// Build relation matrices for every example and summarize linking
    Link {
        #[arg(long)]
        schemas: Option<PathBuf>,
        #[arg(long)]
        examples: Option<PathBuf>,
        /// JSON list with one dependency edge list per example
        #[arg(long)]
        deps: Option<PathBuf>,
    },
    /// Exact-match accuracy of predicted SQL against gold examples
    Evaluate {
        #[arg(long)]
        schemas: Option<PathBuf>,
        #[arg(long)]
        gold: Option<PathBuf>,
        /// One predicted query per line, aligned with the gold file
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Cosine similarity of word pairs under each configured provider
    Simcheck {
        /// Tab-separated pairs, one per line
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Additional vector files to compare (repeatable)
        #[arg(long = "compare-vectors")]
        compare_vectors: Vec<PathBuf>,
        /// Additional embedding endpoints to compare (repeatable)
        #[arg(long = "compare-endpoint")]
        compare_endpoints: Vec<String>,
    },
    /// Write individual relation matrices as standalone documents
    ExportMatrix {
        #[arg(long)]
        schemas: Option<PathBuf>,
        #[arg(long)]
        examples: Option<PathBuf>,
        /// Example positions to export (repeatable; default all)
        #[arg(long)]
        index: Vec<usize>,
    },
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
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = RunConfig::resolve(&cli.global).and_then(|config| {
        config.install_pool()?;
        match cli.command {
            Command::Stats { schemas, train, test } => commands::stats(&config, schemas, train, test),
            Command::Link { schemas, examples, deps } => commands::link(&config, schemas, examples, deps),
            Command::Evaluate { schemas, gold, predictions } => commands::evaluate(&config, schemas, gold, predictions),
            Command::Simcheck { pairs, compare_vectors, compare_endpoints } => {
                commands::simcheck(&config, pairs, compare_vectors, compare_endpoints)
            }
            Command::ExportMatrix { schemas, examples, index } => {
                commands::export_matrix(&config, schemas, examples, index)
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
