use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use ldfs::corpus::{parse_annotations, AnnotationSet};
use ldfs::stats::{krippendorff_alpha, Level, ReliabilityMatrix, StatsError};
use serde::Serialize;
use serde_json::json;

use crate::error::{corpus, Category, CategoryExt};
use crate::manifest::{manifest_path, write_atomic, RunManifest};
use crate::markdown;

#[derive(Debug, Args)]
pub struct IaaArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    /// Alpha report as JSON.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub granularity: &'static str,
    pub level: Level,
    pub alpha: f64,
    pub annotators: usize,
    pub items: usize,
}

/// Items are annotated summary sentences; labels are nominal.
pub fn fine_grained(annotations: &AnnotationSet) -> Result<ReliabilityMatrix, StatsError> {
    let annotators = annotations.annotators();
    let items: BTreeSet<(&str, &str, usize)> = annotations
        .records()
        .iter()
        .map(|r| (r.doc_id.as_str(), r.system_id.as_str(), r.sentence_index))
        .collect();
    let items: Vec<_> = items.into_iter().collect();
    let mut rows = vec![vec![None; items.len()]; annotators.len()];
    for r in annotations.records() {
        let a = annotators.binary_search(&r.annotator_id).expect("known annotator");
        let i = items
            .binary_search(&(r.doc_id.as_str(), r.system_id.as_str(), r.sentence_index))
            .expect("known item");
        rows[a][i] = Some(f64::from(r.label));
    }
    ReliabilityMatrix::new(rows, Level::Nominal)
}

/// Items are summaries; each cell is an annotator's mean label.
pub fn summary_level(annotations: &AnnotationSet) -> Result<ReliabilityMatrix, StatsError> {
    let annotators = annotations.annotators();
    let keys = annotations.summary_keys();
    let mut rows = vec![vec![None; keys.len()]; annotators.len()];
    for (i, k) in keys.iter().enumerate() {
        for (annotator, mean) in annotations.per_annotator_means(&k.doc_id, &k.system_id) {
            let a = annotators
                .binary_search_by(|x| x.as_str().cmp(annotator))
                .expect("known annotator");
            rows[a][i] = Some(mean);
        }
    }
    ReliabilityMatrix::new(rows, Level::Interval)
}

pub fn agreement(annotations: &AnnotationSet) -> anyhow::Result<Vec<Agreement>> {
    [
        ("fine-grained", fine_grained(annotations)),
        ("summary-level", summary_level(annotations)),
    ]
    .into_iter()
    .map(|(granularity, m)| {
        let m = m
            .with_context(|| format!("{granularity} agreement"))
            .category(Category::Input)?;
        let alpha = krippendorff_alpha(&m)
            .with_context(|| format!("{granularity} agreement"))
            .category(Category::Input)?;
        Ok(Agreement {
            granularity,
            level: m.level(),
            alpha,
            annotators: m.annotators(),
            items: m.items(),
        })
    })
    .collect()
}

pub fn run(args: IaaArgs) -> anyhow::Result<()> {
    let mut manifest = RunManifest::start("iaa", json!({"annotations": args.annotations, "out": args.out}));
    let raw = manifest.read_input(&args.annotations)?;
    let raw = String::from_utf8(raw)
        .context("annotations are not UTF-8")
        .category(Category::Input)?;
    let annotations = parse_annotations(&raw, &args.annotations.display().to_string()).map_err(corpus)?;
    let results = agreement(&annotations)?;
    let mut json = serde_json::to_string_pretty(&json!({ "statistic": "krippendorff-alpha", "results": results }))?;
    json.push('\n');
    write_atomic(&args.out, json.as_bytes())?;
    manifest.outputs.push(args.out.display().to_string());
    manifest.finish(&manifest_path(&args.out, args.manifest.as_deref()))?;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.granularity.to_string(),
                format!("{:?}", r.level).to_lowercase(),
                markdown::num(r.alpha),
            ]
        })
        .collect();
    print!("{}", markdown::table(&["granularity", "level", "alpha"], &rows));
    Ok(())
}
