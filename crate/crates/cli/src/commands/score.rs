use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, ValueEnum};
use ldfs::baselines::Baseline;
use ldfs::corpus::{parse_documents, parse_summaries, Corpus};
use ldfs::embedding::EmbeddingBackend;
use ldfs::instrument::{CountingEmbedder, CountingScorer};
use ldfs::ldfs::score_corpus;
use ldfs::report::{to_jsonl, ScoreLine};
use ldfs::retrieval::{MetricConfig, NeighborOffsets, TopK};
use ldfs::scorer::{truncating_baseline_score, ScoreBackend};
use ldfs::segmenter::Segmenter;
use rayon::prelude::*;
use serde_json::json;

use crate::backends::{configure_jobs, value_name, Backends, EmbedChoice, ScorerChoice};
use crate::error::{config_error, corpus, ldfs_error, Category, CategoryExt};
use crate::manifest::{manifest_path, write_atomic, RunManifest};
use crate::markdown;

pub const TRUNCATING_LABEL: &str = "truncating-baseline";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricChoice {
    Ldfs,
    TruncatingBaseline,
    Rouge1,
    Rouge2,
    #[value(name = "rougeL")]
    RougeL,
    EmbedGreedy,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// documents.jsonl with {"doc_id", "text"} lines.
    #[arg(long)]
    pub documents: PathBuf,
    /// summaries.jsonl with {"doc_id", "system_id", "summary"} lines.
    #[arg(long)]
    pub summaries: PathBuf,
    #[arg(long, value_enum, default_value = "ldfs")]
    pub metric: MetricChoice,
    /// Snippets per summary sentence: a positive integer or `I` for all.
    #[arg(long, default_value = "3")]
    pub k: String,
    /// Neighbor offsets around each retrieved sentence.
    #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
    pub offsets: String,
    /// With `--k I`, score every snippet without computing similarities.
    #[arg(long)]
    pub skip_similarity: bool,
    #[arg(long, value_enum, default_value = "hashed")]
    pub embed: EmbedChoice,
    #[arg(long, value_enum, default_value = "lexical")]
    pub scorer: ScorerChoice,
    /// Context token limit of the scorer (used by the truncating baseline).
    #[arg(long)]
    pub token_limit: Option<usize>,
    #[arg(long, env = ldfs::remote::SERVER_URL_ENV)]
    pub server_url: Option<String>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Fail on summary sentences without word tokens instead of skipping them.
    #[arg(long)]
    pub strict: bool,
    /// Abbreviation list for sentence segmentation, one per line.
    #[arg(long)]
    pub abbreviations: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to `<out>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

pub fn parse_config(k: &str, offsets: &str) -> anyhow::Result<(TopK, NeighborOffsets)> {
    let k: TopK = k.parse().map_err(|e| config_error(format!("--k {k:?}: {e}")))?;
    let offsets: NeighborOffsets = offsets
        .parse()
        .map_err(|e| config_error(format!("--offsets {offsets:?}: {e}")))?;
    Ok((k, offsets))
}

pub fn segmenter(abbreviations: Option<&Path>) -> anyhow::Result<Segmenter> {
    match abbreviations {
        None => Ok(Segmenter::default()),
        Some(p) => Segmenter::from_abbreviation_file(p)
            .with_context(|| format!("reading {}", p.display()))
            .category(Category::Input),
    }
}

pub fn load_corpus(
    manifest: &mut RunManifest,
    documents: &Path,
    summaries: &Path,
    segmenter: &Segmenter,
) -> anyhow::Result<Corpus> {
    let d = manifest.read_input(documents)?;
    let s = manifest.read_input(summaries)?;
    let utf8 = |b: Vec<u8>, p: &Path| {
        String::from_utf8(b)
            .with_context(|| format!("{} is not UTF-8", p.display()))
            .category(Category::Input)
    };
    let docs = parse_documents(&utf8(d, documents)?, &documents.display().to_string(), segmenter).map_err(corpus)?;
    let sums = parse_summaries(&utf8(s, summaries)?, &summaries.display().to_string(), segmenter).map_err(corpus)?;
    Corpus::new(docs, sums).map_err(corpus)
}

pub fn run(args: ScoreArgs) -> anyhow::Result<()> {
    let (k, offsets) = parse_config(&args.k, &args.offsets)?;
    if args.skip_similarity && k != TopK::All {
        return Err(config_error("--skip-similarity requires --k I"));
    }
    configure_jobs(args.jobs)?;
    let mut manifest = RunManifest::start(
        "score",
        json!({
            "documents": args.documents,
            "summaries": args.summaries,
            "metric": value_name(&args.metric),
            "k": k.to_string(),
            "offsets": offsets.to_string(),
            "skip_similarity": args.skip_similarity,
            "embed": value_name(&args.embed),
            "scorer": value_name(&args.scorer),
            "token_limit": args.token_limit,
            "server_url": args.server_url,
            "jobs": args.jobs,
            "strict": args.strict,
            "abbreviations": args.abbreviations,
            "out": args.out,
        }),
    );
    let segmenter = segmenter(args.abbreviations.as_deref())?;
    if let Some(p) = &args.abbreviations {
        manifest.read_input(p)?;
    }
    let corpus = load_corpus(&mut manifest, &args.documents, &args.summaries, &segmenter)?;
    let backends = Backends::build(args.embed, args.scorer, args.token_limit, args.server_url.as_deref())?;
    manifest.backends = backends.describe();
    let embedder = CountingEmbedder::new(&*backends.embedder);
    let scorer = CountingScorer::new(&*backends.scorer);

    let lines: Vec<ScoreLine> = match args.metric {
        MetricChoice::Ldfs => {
            let mut config = MetricConfig::new(k, offsets).with_backends(embedder.backend_id(), scorer.backend_id());
            config.strict = args.strict;
            config.skip_similarity = args.skip_similarity;
            let reports = score_corpus(corpus.documents(), corpus.summaries(), &config, &embedder, &scorer)
                .map_err(ldfs_error)?;
            reports.into_iter().map(ScoreLine::from).collect()
        }
        MetricChoice::TruncatingBaseline => corpus
            .summaries()
            .par_iter()
            .map(|s| {
                let doc = corpus.document(&s.doc_id).expect("validated corpus");
                let score = truncating_baseline_score(&scorer, &s.summary_text, doc)
                    .with_context(|| format!("scoring {}", s.key()))
                    .category(Category::Backend)?;
                Ok(ScoreLine {
                    doc_id: s.doc_id.clone(),
                    system_id: s.system_id.clone(),
                    metric: TRUNCATING_LABEL.to_string(),
                    summary_score: score,
                    sentence_results: Vec::new(),
                    config: json!({
                        "score_backend_id": scorer.backend_id(),
                        "token_limit": scorer.token_limit(),
                    }),
                    scorer_call_count: 1,
                    score_variant: Some(scorer.variant().to_string()),
                    warnings: Vec::new(),
                })
            })
            .collect::<anyhow::Result<_>>()?,
        other => {
            let baseline = match other {
                MetricChoice::Rouge1 => Baseline::Rouge1,
                MetricChoice::Rouge2 => Baseline::Rouge2,
                MetricChoice::RougeL => Baseline::RougeL,
                _ => Baseline::EmbedGreedy,
            };
            corpus
                .summaries()
                .par_iter()
                .map(|s| {
                    let doc = corpus.document(&s.doc_id).expect("validated corpus");
                    let score = baseline
                        .score(&s.summary_text, &doc.text, &embedder)
                        .with_context(|| format!("scoring {}", s.key()))
                        .category(Category::Backend)?;
                    let config = match baseline {
                        Baseline::EmbedGreedy => json!({"embed_backend_id": embedder.backend_id()}),
                        _ => json!({}),
                    };
                    Ok(ScoreLine {
                        doc_id: s.doc_id.clone(),
                        system_id: s.system_id.clone(),
                        metric: baseline.label().to_string(),
                        summary_score: score,
                        sentence_results: Vec::new(),
                        config,
                        scorer_call_count: 0,
                        score_variant: None,
                        warnings: Vec::new(),
                    })
                })
                .collect::<anyhow::Result<_>>()?
        }
    };

    for line in &lines {
        for w in &line.warnings {
            log::warn!("{}: {w}", line.key());
        }
    }
    write_atomic(&args.out, to_jsonl(&lines).as_bytes())?;
    manifest.outputs.push(args.out.display().to_string());
    manifest.scorer_calls = scorer.pairs();
    manifest.embed_texts = embedder.texts();
    manifest.embed_batches = embedder.batches();
    manifest.finish(&manifest_path(&args.out, args.manifest.as_deref()))?;

    let rows: Vec<Vec<String>> = lines
        .iter()
        .map(|l| {
            vec![
                l.doc_id.clone(),
                l.system_id.clone(),
                l.metric.clone(),
                markdown::num(l.summary_score),
            ]
        })
        .collect();
    print!(
        "{}",
        markdown::table(&["doc_id", "system_id", "metric", "score"], &rows)
    );
    Ok(())
}
