use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ldfs::corpus::Corpus;
use ldfs::fixtures::{evidence_at_end_fixture, synthetic_corpus, SyntheticSpec};
use ldfs::scorer::DEFAULT_TOKEN_LIMIT;

use crate::manifest::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    /// 15 documents of 200 sentences with one 10-sentence summary each.
    Benchmark,
    /// Two short documents with two summaries each.
    Randomized,
    /// Evidence pushed past the truncation limit by leading padding.
    EvidencePadded,
    /// The same document without padding.
    EvidenceBase,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: FixtureKind,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Truncation limit the evidence fixture is built around.
    #[arg(long, default_value_t = DEFAULT_TOKEN_LIMIT)]
    pub token_limit: usize,
    /// Directory receiving documents.jsonl and summaries.jsonl.
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: GenerateArgs) -> anyhow::Result<()> {
    let corpus = match args.kind {
        FixtureKind::Benchmark => synthetic_corpus(&SyntheticSpec::benchmark(args.seed)),
        FixtureKind::Randomized => synthetic_corpus(&SyntheticSpec::randomized(args.seed)),
        FixtureKind::EvidencePadded => evidence_at_end_fixture(args.token_limit).padded_corpus(),
        FixtureKind::EvidenceBase => {
            let fx = evidence_at_end_fixture(args.token_limit);
            Corpus::new(vec![fx.base], vec![fx.summary])?
        }
    };
    write_atomic(
        &args.out_dir.join("documents.jsonl"),
        corpus.documents_jsonl().as_bytes(),
    )?;
    write_atomic(
        &args.out_dir.join("summaries.jsonl"),
        corpus.summaries_jsonl().as_bytes(),
    )?;
    println!(
        "wrote {} documents and {} summaries to {}",
        corpus.documents().count(),
        corpus.summaries().len(),
        args.out_dir.display()
    );
    Ok(())
}
