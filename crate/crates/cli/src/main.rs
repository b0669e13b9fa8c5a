use clap::{Parser, Subcommand};

mod backends;
mod commands;
mod error;
mod manifest;
mod markdown;

use commands::{bench, generate, iaa, meta_eval, score};

/// Factual-consistency scoring for long-document summaries.
#[derive(Debug, Parser)]
#[command(name = "ldfs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score summaries against their source documents.
    Score(score::ScoreArgs),
    /// Correlate metric scores with human annotations.
    MetaEval(meta_eval::MetaEvalArgs),
    /// Inter-annotator agreement of the human annotations.
    Iaa(iaa::IaaArgs),
    /// Time and count scorer calls across retrieval settings.
    Bench(bench::BenchArgs),
    /// Write a seeded fixture corpus.
    Generate(generate::GenerateArgs),
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Score(a) => score::run(a),
        Command::MetaEval(a) => meta_eval::run(a),
        Command::Iaa(a) => iaa::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Generate(a) => generate::run(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(error::exit_code(&e));
    }
}
