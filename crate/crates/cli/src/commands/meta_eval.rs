use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use indexmap::IndexMap;
use ldfs::corpus::{parse_annotations, AnnotationSet, SummaryKey};
use ldfs::report::parse_score_lines;
use ldfs::stats::{correlation_matrix, CorrelationMatrix, Statistic};
use serde::Serialize;
use serde_json::json;

use crate::error::{config_error, corpus, input_error, Category, CategoryExt};
use crate::manifest::{manifest_path, write_atomic, RunManifest};
use crate::markdown;

pub const HUMAN_COLUMN: &str = "human";

#[derive(Debug, Args)]
pub struct MetaEvalArgs {
    /// scores.jsonl files; may be repeated.
    #[arg(long, required = true, num_args = 1..)]
    pub scores: Vec<PathBuf>,
    #[arg(long)]
    pub annotations: PathBuf,
    /// kendall, spearman or pearson.
    #[arg(long, default_value = "kendall")]
    pub statistic: String,
    /// Pairwise correlations as JSON lines.
    #[arg(long)]
    pub out: PathBuf,
    /// Square correlation matrix as CSV, including the human column.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct PairLine<'a> {
    pub metric_a: &'a str,
    pub metric_b: &'a str,
    pub statistic: &'a str,
    pub value: f64,
    pub n: usize,
}

/// Metric columns aligned to sorted annotation keys, with the human column first.
pub fn score_table(
    annotations: &AnnotationSet,
    metrics: &IndexMap<String, BTreeMap<SummaryKey, f64>>,
) -> anyhow::Result<IndexMap<String, Vec<f64>>> {
    let mut keys = annotations.summary_keys();
    keys.sort();
    let mut table = IndexMap::new();
    let human: Vec<f64> = keys
        .iter()
        .map(|k| annotations.summary_level_human_score(&k.doc_id, &k.system_id))
        .collect::<Result<_, _>>()
        .map_err(corpus)?;
    table.insert(HUMAN_COLUMN.to_string(), human);
    for (metric, scores) in metrics {
        let missing: Vec<String> = keys
            .iter()
            .filter(|k| !scores.contains_key(k))
            .map(|k| k.to_string())
            .collect();
        let extra: Vec<String> = scores
            .keys()
            .filter(|k| keys.binary_search(k).is_err())
            .map(|k| k.to_string())
            .collect();
        if !missing.is_empty() || !extra.is_empty() {
            return Err(input_error(format!(
                "key mismatch for metric {metric:?}: missing scores for [{}]; scored but not annotated [{}]",
                missing.join(", "),
                extra.join(", ")
            )));
        }
        table.insert(metric.clone(), keys.iter().map(|k| scores[k]).collect());
    }
    Ok(table)
}

pub fn matrix_csv(matrix: &CorrelationMatrix) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![matrix.statistic.label().to_string()];
    header.extend(matrix.names.iter().cloned());
    w.write_record(&header)?;
    for (name, row) in matrix.names.iter().zip(&matrix.values) {
        let mut record = vec![name.clone()];
        record.extend(row.iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    Ok(w.into_inner()?)
}

pub fn run(args: MetaEvalArgs) -> anyhow::Result<()> {
    let statistic: Statistic = args.statistic.parse().map_err(config_error)?;
    let mut manifest = RunManifest::start(
        "meta-eval",
        json!({
            "scores": args.scores,
            "annotations": args.annotations,
            "statistic": statistic.label(),
            "out": args.out,
            "matrix": args.matrix,
        }),
    );
    let raw = manifest.read_input(&args.annotations)?;
    let raw = String::from_utf8(raw)
        .context("annotations are not UTF-8")
        .category(Category::Input)?;
    let annotations = parse_annotations(&raw, &args.annotations.display().to_string()).map_err(corpus)?;

    let mut metrics: IndexMap<String, BTreeMap<SummaryKey, f64>> = IndexMap::new();
    for path in &args.scores {
        let raw = manifest.read_input(path)?;
        let raw = String::from_utf8(raw)
            .with_context(|| format!("{} is not UTF-8", path.display()))
            .category(Category::Input)?;
        for line in parse_score_lines(&raw, &path.display().to_string()).map_err(corpus)? {
            if line.metric == HUMAN_COLUMN {
                return Err(input_error(format!("metric name {HUMAN_COLUMN:?} is reserved")));
            }
            let key = line.key();
            if metrics
                .entry(line.metric.clone())
                .or_default()
                .insert(key.clone(), line.summary_score)
                .is_some()
            {
                return Err(input_error(format!("duplicate {} score for {key}", line.metric)));
            }
        }
    }
    let table = score_table(&annotations, &metrics)?;
    let matrix = correlation_matrix(&table, statistic).category(Category::Input)?;

    let mut jsonl = String::new();
    let mut rows = Vec::new();
    for a in 0..matrix.names.len() {
        for b in a + 1..matrix.names.len() {
            let line = PairLine {
                metric_a: &matrix.names[b],
                metric_b: &matrix.names[a],
                statistic: statistic.label(),
                value: matrix.values[a][b],
                n: matrix.n,
            };
            jsonl.push_str(&serde_json::to_string(&line)?);
            jsonl.push('\n');
            if a == 0 {
                rows.push(vec![
                    matrix.names[b].clone(),
                    markdown::num(line.value),
                    matrix.n.to_string(),
                ]);
            }
        }
    }
    write_atomic(&args.out, jsonl.as_bytes())?;
    manifest.outputs.push(args.out.display().to_string());
    if let Some(path) = &args.matrix {
        write_atomic(path, &matrix_csv(&matrix)?)?;
        manifest.outputs.push(path.display().to_string());
    }
    manifest.finish(&manifest_path(&args.out, args.manifest.as_deref()))?;
    print!(
        "{}",
        markdown::table(&["metric", &format!("{} vs human", statistic.label()), "n"], &rows)
    );
    Ok(())
}
