use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use rankforge_core::metrics::{evaluate, predicted_order};
use rankforge_core::{Error, RankMetricReport};

use crate::args::{EvalArgs, PredictArgs};
use crate::load::{load_for_model, load_model, require_data};
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricName {
    Mrr,
    Ndcg(usize),
    Err,
}

impl MetricName {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown metric '{s}'; expected mrr, err or ndcg@<k>"));
        match s {
            "mrr" => Ok(MetricName::Mrr),
            "err" => Ok(MetricName::Err),
            _ => {
                let k: usize = s
                    .strip_prefix("ndcg@")
                    .and_then(|k| k.parse().ok())
                    .filter(|&k| k > 0)
                    .ok_or_else(bad)?;
                Ok(MetricName::Ndcg(k))
            }
        }
    }

    pub fn label(self) -> String {
        match self {
            MetricName::Mrr => "mrr".into(),
            MetricName::Ndcg(k) => format!("ndcg@{k}"),
            MetricName::Err => "err".into(),
        }
    }
}

pub fn parse_metric_list(list: &str) -> Result<Vec<MetricName>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(MetricName::parse)
        .collect()
}

fn cutoffs(metrics: &[MetricName]) -> Vec<usize> {
    let mut c: Vec<usize> = metrics
        .iter()
        .filter_map(|m| match m {
            MetricName::Ndcg(k) => Some(*k),
            _ => None,
        })
        .collect();
    c.sort_unstable();
    c.dedup();
    c
}

fn average(report: &RankMetricReport, m: MetricName) -> f64 {
    match m {
        MetricName::Mrr => report.mrr,
        MetricName::Ndcg(k) => report.ndcg_at[&k],
        MetricName::Err => report.err,
    }
}

pub fn run_eval(args: EvalArgs) -> Result<()> {
    let metrics = parse_metric_list(&args.metrics)?;
    let mut manifest = RunManifest::new("eval");
    let model = load_model(&args.model)?;
    let dataset = load_for_model(&args.model, &model, &args.data)?;
    let scores = model.score_dataset(&dataset)?;
    let report = evaluate(&dataset, &scores, &cutoffs(&metrics))?;
    for &m in &metrics {
        println!("metric={} value={}", m.label(), average(&report, m));
    }
    if let Some(path) = &args.per_query {
        let mut out = String::from("qid");
        for m in &metrics {
            write!(out, "\t{}", m.label())?;
        }
        out.push('\n');
        for q in &report.per_query {
            out.push_str(&q.query_id);
            for m in &metrics {
                let v = match m {
                    MetricName::Mrr => q.mrr,
                    MetricName::Ndcg(k) => q.ndcg_at[k],
                    MetricName::Err => q.err,
                };
                write!(out, "\t{v}")?;
            }
            out.push('\n');
        }
        fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    }
    manifest.push("model", args.model.display());
    manifest.push_checksum("model", &args.model)?;
    manifest.push("data", require_data(&args.data)?.display());
    manifest.push_checksum("data", require_data(&args.data)?)?;
    manifest.push("metrics", &args.metrics);
    manifest.finish(args.manifest.as_deref())
}

/// TSV rows `qid, rank, orig_index, score` in predicted order.
pub fn prediction_rows(dataset: &rankforge_core::Dataset, scores: &[Vec<f64>]) -> Result<String> {
    let mut out = String::new();
    for (q, s) in dataset.queries.iter().zip(scores) {
        for (rank, &i) in predicted_order(s)?.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}\t{}", q.id, rank + 1, i, s[i])?;
        }
    }
    Ok(out)
}

pub fn run_predict(args: PredictArgs) -> Result<()> {
    let mut manifest = RunManifest::new("predict");
    let model = load_model(&args.model)?;
    let dataset = load_for_model(&args.model, &model, &args.data)?;
    let rows = prediction_rows(&dataset, &model.score_dataset(&dataset)?)?;
    match &args.out {
        Some(p) => fs::write(p, rows).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{rows}"),
    }
    manifest.push("model", args.model.display());
    manifest.push_checksum("model", &args.model)?;
    manifest.push("data", require_data(&args.data)?.display());
    manifest.push_checksum("data", require_data(&args.data)?)?;
    manifest.finish(args.manifest.as_deref())
}
