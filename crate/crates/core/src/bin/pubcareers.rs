use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pubcareers::pipeline::{self, Stage};
use pubcareers::AnalysisConfig;

/// Career analytics over a bibliographic corpus.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run directory for stage artifacts.
    #[arg(long, global = true, default_value = "run")]
    out: PathBuf,
    /// Worker threads (0 = all cores); overrides the config.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Fail on malformed corpus lines instead of skipping them.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Parse, validate and filter the corpus.
    Ingest,
    /// Infer author gender from names and affiliations.
    InferGender,
    /// Build careers and country eligibility.
    BuildCareers,
    /// Compute the cohort tables.
    Stats,
    /// Score inferred genders against a labeled set.
    Evaluate,
    /// Write a seeded synthetic dataset with ground truth.
    GenSynthetic,
    /// Run ingest through evaluate.
    All,
}

impl From<Command> for Stage {
    fn from(c: Command) -> Stage {
        match c {
            Command::Ingest => Stage::Ingest,
            Command::InferGender => Stage::InferGender,
            Command::BuildCareers => Stage::BuildCareers,
            Command::Stats => Stage::Stats,
            Command::Evaluate => Stage::Evaluate,
            Command::GenSynthetic => Stage::GenSynthetic,
            Command::All => Stage::All,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => AnalysisConfig::load(path),
        None => AnalysisConfig::from_toml_with_env("", std::path::Path::new("."), std::env::vars()),
    };
    let mut config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Some(t) = cli.threads {
        config.threads = t;
    }
    config.strict |= cli.strict;
    let stage = Stage::from(cli.command);
    match pipeline::run(stage, &config, &cli.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {stage}: {e}");
            ExitCode::FAILURE
        }
    }
}
