use std::path::PathBuf;
use std::time::Duration;

use clap::Args;
use ldfs::benchmark::{default_settings, k_sweep, offsets_sweep, run_bench, BenchRow, BenchSetting, REFERENCE_SECONDS};
use ldfs::fixtures::{synthetic_corpus, SyntheticSpec};
use ldfs::instrument::LatencyScorer;
use ldfs::retrieval::{NeighborOffsets, TopK};
use ldfs::scorer::ScoreBackend;
use serde_json::json;

use crate::backends::{configure_jobs, value_name, Backends, EmbedChoice, ScorerChoice};
use crate::commands::score::{load_corpus, parse_config, segmenter};
use crate::error::{config_error, ldfs_error};
use crate::manifest::{manifest_path, write_atomic, RunManifest};
use crate::markdown;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Benchmark on this corpus instead of the synthetic one.
    #[arg(long, requires = "summaries")]
    pub documents: Option<PathBuf>,
    #[arg(long, requires = "documents")]
    pub summaries: Option<PathBuf>,
    /// Seed of the synthetic corpus (15 documents of 200 sentences).
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "hashed")]
    pub embed: EmbedChoice,
    #[arg(long, value_enum, default_value = "noop")]
    pub scorer: ScorerChoice,
    /// Simulated scorer latency per scored pair.
    #[arg(long, default_value_t = 0.0)]
    pub latency_ms: f64,
    /// Comma-separated K values, e.g. `1,3,5,7,9,11,I`.
    #[arg(long)]
    pub sweep_k: Option<String>,
    /// Semicolon-separated offset sets, e.g. `0;-1,0,1;-2,0,2`.
    #[arg(long, allow_hyphen_values = true)]
    pub sweep_offsets: Option<String>,
    /// K used by the offsets sweep.
    #[arg(long, default_value = "3")]
    pub k: String,
    /// Offsets used by the default settings and the K sweep.
    #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
    pub offsets: String,
    #[arg(long)]
    pub token_limit: Option<usize>,
    #[arg(long, env = ldfs::remote::SERVER_URL_ENV)]
    pub server_url: Option<String>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// CSV report path.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

pub fn settings(
    k: TopK,
    offsets: &NeighborOffsets,
    sweep_k: Option<&str>,
    sweep_offsets: Option<&str>,
) -> anyhow::Result<Vec<BenchSetting>> {
    if sweep_k.is_none() && sweep_offsets.is_none() {
        return Ok(default_settings(offsets));
    }
    let mut out = Vec::new();
    if let Some(list) = sweep_k {
        let ks = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<TopK>()
                    .map_err(|e| config_error(format!("--sweep-k {v:?}: {e}")))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        out.extend(k_sweep(&ks, offsets));
    }
    if let Some(list) = sweep_offsets {
        let sets = list
            .split(';')
            .map(|v| {
                v.trim()
                    .parse::<NeighborOffsets>()
                    .map_err(|e| config_error(format!("--sweep-offsets {v:?}: {e}")))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        out.extend(offsets_sweep(k, &sets));
    }
    Ok(out)
}

pub fn rows_csv(rows: &[BenchRow]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

pub fn run(args: BenchArgs) -> anyhow::Result<()> {
    let (k, offsets) = parse_config(&args.k, &args.offsets)?;
    let settings = settings(k, &offsets, args.sweep_k.as_deref(), args.sweep_offsets.as_deref())?;
    if !(args.latency_ms >= 0.0 && args.latency_ms.is_finite()) {
        return Err(config_error("--latency-ms must be a non-negative number"));
    }
    configure_jobs(args.jobs)?;
    let mut manifest = RunManifest::start(
        "bench",
        json!({
            "documents": args.documents,
            "summaries": args.summaries,
            "seed": args.seed,
            "embed": value_name(&args.embed),
            "scorer": value_name(&args.scorer),
            "latency_ms": args.latency_ms,
            "settings": settings.iter().map(|s| &s.label).collect::<Vec<_>>(),
            "token_limit": args.token_limit,
            "server_url": args.server_url,
            "jobs": args.jobs,
            "out": args.out,
        }),
    );
    let corpus = match (&args.documents, &args.summaries) {
        (Some(d), Some(s)) => load_corpus(&mut manifest, d, s, &segmenter(None)?)?,
        _ => synthetic_corpus(&SyntheticSpec::benchmark(args.seed)),
    };
    let backends = Backends::build(args.embed, args.scorer, args.token_limit, args.server_url.as_deref())?;
    manifest.backends = backends.describe();
    let latency = Duration::from_secs_f64(args.latency_ms / 1000.0);
    let scorer: Box<dyn ScoreBackend + '_> = if latency.is_zero() {
        Box::new(&*backends.scorer)
    } else {
        Box::new(LatencyScorer::new(&*backends.scorer, latency))
    };
    let rows = run_bench(&corpus, &settings, &*backends.embedder, &*scorer).map_err(ldfs_error)?;

    write_atomic(&args.out, &rows_csv(&rows)?)?;
    manifest.outputs.push(args.out.display().to_string());
    manifest.scorer_calls = rows.iter().map(|r| r.scorer_calls).sum();
    manifest.embed_texts = rows.iter().map(|r| r.embed_texts).sum();
    manifest.embed_batches = rows.iter().map(|r| r.embed_batches).sum();
    manifest.finish(&manifest_path(&args.out, args.manifest.as_deref()))?;

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let reference = REFERENCE_SECONDS
                .iter()
                .find(|(label, _)| *label == r.setting)
                .map_or_else(|| "-".to_string(), |(_, s)| format!("{s}"));
            vec![
                r.setting.clone(),
                r.scorer_calls.to_string(),
                r.embed_texts.to_string(),
                format!("{:.3}", r.wall_clock_s),
                reference,
                markdown::num(r.mean_summary_score),
            ]
        })
        .collect();
    print!(
        "{}",
        markdown::table(
            &[
                "setting",
                "scorer calls",
                "embedded texts",
                "wall clock (s)",
                "reference GPU (s)",
                "mean score"
            ],
            &table
        )
    );
    println!("\nReference timings are for 15 summaries with model backends on a GPU; shown for context only.");
    Ok(())
}
