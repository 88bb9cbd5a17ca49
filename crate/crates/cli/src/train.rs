use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use rankforge_core::data::{apply_normalization, zscore_normalize, NormalizationStats};
use rankforge_core::functionals::{select_second_order, Family, GroupAggregation, Squash};
use rankforge_core::losses::{ElementWeightScheme, PairWeightScheme};
use rankforge_core::metrics::evaluate;
use rankforge_core::optimizer::{init_params, minimize, minimize_multistart, LossOptions, LOSS_NAMES};
use rankforge_core::probmodels::Gamma;
use rankforge_core::{Dataset, Error, LossSpec, Model, TrainConfig, TrainReport};

use crate::args::{Format, LossArgs, ModelArgs, TrainArgs};
use crate::load::{load_dataset, require_data, save_model, save_stats, sidecar};
use crate::manifest::{read_manifest, sha256_file, RunManifest};

pub const DEFAULT_LAMBDA: f64 = 0.1;
pub const DEFAULT_RHO: f64 = 0.5;
/// Candidates tried on the development split when `--lambda` is omitted.
pub const LAMBDA_GRID: [f64; 5] = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
/// Candidates tried on the development split when `--rho` is omitted.
pub const RHO_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

fn config_err(message: String) -> anyhow::Error {
    Error::Config(message).into()
}

fn parse_named<T>(kind: &str, value: &str, parse: impl Fn(&str) -> Option<T>, names: &[&str]) -> Result<T> {
    parse(value).ok_or_else(|| config_err(format!("unknown {kind} '{value}'; expected one of {}", names.join(", "))))
}

pub fn loss_spec(args: &LossArgs) -> Result<LossSpec> {
    let element_weights = parse_named(
        "element weight",
        &args.eweight,
        ElementWeightScheme::from_name,
        &ElementWeightScheme::ALL.map(ElementWeightScheme::name),
    )?;
    let pair_weights = parse_named(
        "pair weight",
        &args.pweight,
        PairWeightScheme::from_name,
        &PairWeightScheme::ALL.map(PairWeightScheme::name),
    )?;
    let aggregation = parse_named(
        "aggregation",
        &args.agg,
        GroupAggregation::from_name,
        &GroupAggregation::ALL.map(GroupAggregation::name),
    )?;
    let gamma = match args.gamma.as_str() {
        "auto" => Gamma::Auto,
        v => Gamma::Fixed(
            v.parse::<f64>()
                .map_err(|_| config_err(format!("gamma must be a number or 'auto', got '{v}'")))?,
        ),
    };
    let opts = LossOptions {
        element_weights,
        pair_weights,
        aggregation,
        gamma,
        scale: args.scale,
    };
    if !LOSS_NAMES.contains(&args.loss.as_str()) {
        return Err(config_err(format!(
            "unknown loss '{}'; expected one of {}",
            args.loss,
            LOSS_NAMES.join(", ")
        )));
    }
    Ok(LossSpec::from_name(&args.loss, &opts)?)
}

pub fn family(args: &ModelArgs, format: Format) -> Result<Family> {
    let family = parse_named(
        "functional",
        &args.functional,
        Family::from_name,
        &["linear", "quad", "bilinear", "metric"],
    )?;
    match (family.needs_combined(), format) {
        (true, Format::Separate) => Err(config_err(format!(
            "functional '{}' needs --format letor",
            family.name()
        ))),
        (false, Format::Letor) => Err(config_err(format!(
            "functional '{}' needs --format separate",
            family.name()
        ))),
        _ => Ok(family),
    }
}

/// An untrained model of `family` shaped for `train`.
pub fn build_model(args: &ModelArgs, family: Family, train: &Dataset, rho: f64) -> Result<Model> {
    use rankforge_core::data::Representation;
    let model = match (family, train.representation) {
        (Family::Linear, Representation::Combined { dim }) => Model::linear(dim),
        (Family::Quadratic, Representation::Combined { dim }) => {
            Model::quadratic(dim, select_second_order(train, rho)?)?
        }
        (
            Family::Bilinear,
            Representation::Separate {
                query_dim,
                object_dim,
            },
        ) => {
            let squash = parse_named("squash", &args.squash, Squash::from_name, &["sigmoid", "tanh"])?;
            Model::bilinear(args.embed_dim, query_dim, object_dim, squash)?
        }
        (
            Family::Metric,
            Representation::Separate {
                query_dim,
                object_dim,
            },
        ) => Model::metric(args.embed_dim, query_dim, object_dim, args.tau)?,
        _ => return Err(Error::UnsupportedRepresentation { expected: "matching" }.into()),
    };
    Ok(model)
}

fn warn_multi_best(dataset: &Dataset) {
    let count = dataset
        .queries
        .iter()
        .filter(|q| {
            let r = q.ratings();
            let top = r.iter().copied().max().unwrap_or(0);
            r.iter().filter(|&&x| x == top).count() > 1
        })
        .count();
    if count > 0 {
        eprintln!(
            "warning: {count} of {} queries have several top-rated objects; mlogit uses the whole best set",
            dataset.queries.len()
        );
    }
}

/// Training and development data after optional normalization.
pub struct Prepared {
    pub train: Dataset,
    pub dev: Option<Dataset>,
    pub stats: Option<NormalizationStats<f64>>,
}

pub fn prepare(args: &TrainArgs) -> Result<Prepared> {
    let data = require_data(&args.data)?;
    let train = load_dataset(data, args.data.format, args.data.queries.as_deref(), args.data.levels, None)?;
    let dev = match &args.dev {
        Some(p) => Some(load_dataset(
            p,
            args.data.format,
            args.dev_queries.as_deref(),
            Some(train.num_levels),
            Some(train.representation),
        )?),
        None => None,
    };
    if !args.normalize {
        return Ok(Prepared { train, dev, stats: None });
    }
    let (train, stats) = zscore_normalize(&train)?;
    let dev = dev.map(|d| apply_normalization(&d, &stats)).transpose()?;
    Ok(Prepared {
        train,
        dev,
        stats: Some(stats),
    })
}

pub fn dev_err(model: &Model, dev: &Dataset) -> Result<f64> {
    Ok(evaluate(dev, &model.score_dataset(dev)?, &[10])?.err)
}

/// Outcome of one full training run.
pub struct Fitted {
    pub model: Model,
    pub report: TrainReport<f64>,
    pub lambda: f64,
    pub rho: Option<f64>,
    /// Seed of the kept start.
    pub seed: u64,
}

fn train_config(args: &TrainArgs, lambda: f64) -> TrainConfig {
    TrainConfig {
        lambda,
        max_iters: args.iters,
        memory: args.memory,
        grad_tol: args.grad_tol,
        seed: args.seed[0],
        bit_exact: args.bit_exact,
    }
}

/// Trains once per (rho, lambda) candidate and keeps the best by development
/// ERR; with a single candidate, trains once. `verbose` prints development
/// metrics after every iteration of the final run.
pub fn fit(args: &TrainArgs, prepared: &Prepared, verbose: bool) -> Result<Fitted> {
    let family = family(&args.model, args.data.format)?;
    let loss = loss_spec(&args.loss)?;
    let lambdas: Vec<f64> = match (args.lambda, &prepared.dev) {
        (Some(l), _) => vec![l],
        (None, Some(_)) => LAMBDA_GRID.to_vec(),
        (None, None) => vec![DEFAULT_LAMBDA],
    };
    let rhos: Vec<Option<f64>> = match (family, args.model.rho, &prepared.dev) {
        (Family::Quadratic, Some(r), _) => vec![Some(r)],
        (Family::Quadratic, None, Some(_)) => RHO_GRID.iter().copied().map(Some).collect(),
        (Family::Quadratic, None, None) => vec![Some(DEFAULT_RHO)],
        _ => vec![None],
    };
    let train = &prepared.train;
    let (rho, lambda) = if lambdas.len() * rhos.len() > 1 {
        let dev = prepared.dev.as_ref().expect("grid needs dev data");
        let mut best: Option<(f64, Option<f64>, f64)> = None;
        for &rho in &rhos {
            let shape = build_model(&args.model, family, train, rho.unwrap_or(DEFAULT_RHO))?;
            let init = init_params(&shape, args.seed[0])?;
            for &lambda in &lambdas {
                let (model, _) = minimize(&init, train, &loss, &train_config(args, lambda), |_, _, _| {})?;
                let err = dev_err(&model, dev)?;
                let rho_text = rho.map_or("none".to_string(), |r| r.to_string());
                eprintln!("tune rho={rho_text} lambda={lambda} dev_err={err:.6}");
                if best.is_none_or(|(e, _, _)| err > e) {
                    best = Some((err, rho, lambda));
                }
            }
        }
        let (_, rho, lambda) = best.expect("non-empty grid");
        (rho, lambda)
    } else {
        (rhos[0], lambdas[0])
    };
    let shape = build_model(&args.model, family, train, rho.unwrap_or(DEFAULT_RHO))?;
    let dev = prepared.dev.as_ref().filter(|_| verbose);
    let label = |seed: u64| if args.seed.len() > 1 { format!("seed={seed} ") } else { String::new() };
    let (model, report, seed) = minimize_multistart(
        &shape,
        train,
        &loss,
        &train_config(args, lambda),
        &args.seed,
        |seed, k, m, risk| {
            if let Some(dev) = dev {
                let at = label(seed);
                match m.score_dataset(dev).and_then(|s| evaluate(dev, &s, &[10])) {
                    Ok(r) => eprintln!("{at}iter={k} risk={risk} dev_ndcg@10={:.6} dev_err={:.6}", r.ndcg_at[&10], r.err),
                    Err(e) => eprintln!("{at}iter={k} risk={risk} dev_error={e}"),
                }
            }
        },
    )?;
    Ok(Fitted {
        model,
        report,
        lambda,
        rho,
        seed,
    })
}

/// Resolved flags in manifest form, `flag.<long-name>`.
fn flag_entries(args: &TrainArgs, model_out: &Path, fitted: &Fitted) -> Vec<(String, String)> {
    let mut v: Vec<(&str, String)> = Vec::new();
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    if let Some(p) = path(&args.data.data) {
        v.push(("data", p));
    }
    v.push(("format", args.data.format.name().to_string()));
    if let Some(p) = path(&args.data.queries) {
        v.push(("queries", p));
    }
    if let Some(l) = args.data.levels {
        v.push(("levels", l.to_string()));
    }
    if let Some(p) = path(&args.dev) {
        v.push(("dev", p));
    }
    if let Some(p) = path(&args.dev_queries) {
        v.push(("dev-queries", p));
    }
    v.push(("functional", args.model.functional.clone()));
    if let Some(r) = fitted.rho {
        v.push(("rho", r.to_string()));
    }
    v.push(("embed-dim", args.model.embed_dim.to_string()));
    v.push(("tau", args.model.tau.to_string()));
    v.push(("squash", args.model.squash.clone()));
    v.push(("loss", args.loss.loss.clone()));
    v.push(("eweight", args.loss.eweight.clone()));
    v.push(("pweight", args.loss.pweight.clone()));
    v.push(("agg", args.loss.agg.clone()));
    v.push(("gamma", args.loss.gamma.clone()));
    v.push(("scale", args.loss.scale.to_string()));
    v.push(("lambda", fitted.lambda.to_string()));
    v.push(("iters", args.iters.to_string()));
    v.push(("memory", args.memory.to_string()));
    v.push(("grad-tol", args.grad_tol.to_string()));
    v.push(("seed", args.seed.iter().map(u64::to_string).collect::<Vec<_>>().join(",")));
    v.push(("bit-exact", args.bit_exact.to_string()));
    v.push(("normalize", args.normalize.to_string()));
    v.push(("model-out", model_out.display().to_string()));
    v.into_iter().map(|(k, val)| (format!("flag.{k}"), val)).collect()
}

#[derive(Parser)]
#[command(no_binary_name = true)]
struct ReplayCli {
    #[command(flatten)]
    args: TrainArgs,
}

/// Reconstructs the training arguments recorded in a manifest, checking that
/// every recorded input file still has its recorded checksum.
pub fn args_from_manifest(map: &HashMap<String, String>) -> Result<TrainArgs> {
    if map.get("command").map(String::as_str) != Some("train") {
        bail!("manifest does not describe a train run");
    }
    let mut argv: Vec<String> = Vec::new();
    let mut keys: Vec<&String> = map.keys().filter(|k| k.starts_with("flag.")).collect();
    keys.sort();
    for key in keys {
        let name = &key["flag.".len()..];
        let value = &map[key];
        match value.as_str() {
            "true" if matches!(name, "bit-exact" | "normalize") => argv.push(format!("--{name}")),
            "false" if matches!(name, "bit-exact" | "normalize") => {}
            _ => {
                argv.push(format!("--{name}"));
                argv.push(value.clone());
            }
        }
    }
    let args = ReplayCli::try_parse_from(argv)
        .map_err(|e| anyhow!("manifest flags do not parse: {e}"))?
        .args;
    for (key, sum) in map.iter().filter(|(k, _)| k.starts_with("checksum.")) {
        let name = &key["checksum.".len()..];
        let path = map
            .get(&format!("flag.{name}"))
            .ok_or_else(|| anyhow!("manifest has a checksum for '{name}' but no path"))?;
        let now = sha256_file(Path::new(path))?;
        if &now != sum {
            bail!("{path} changed since the manifest was written (sha256 {now}, recorded {sum})");
        }
    }
    Ok(args)
}

pub fn run(mut args: TrainArgs) -> Result<()> {
    let mut manifest = RunManifest::new("train");
    if let Some(path) = args.replay.clone() {
        let map = read_manifest(&path)?;
        let mut replayed = args_from_manifest(&map)?;
        if args.model_out.is_some() {
            replayed.model_out = args.model_out.clone();
        }
        replayed.manifest = args.manifest.clone();
        manifest.push("replay", path.display());
        args = replayed;
    }
    // configuration errors surface before any data is read
    loss_spec(&args.loss)?;
    let family = family(&args.model, args.data.format)?;
    TrainConfig {
        lambda: args.lambda.unwrap_or(DEFAULT_LAMBDA),
        ..train_config(&args, DEFAULT_LAMBDA)
    }
    .validate()?;
    if args.normalize && !family.needs_combined() {
        return Err(config_err("--normalize applies to --format letor only".into()));
    }
    let model_out = args.model_out.clone().unwrap_or_else(|| PathBuf::from("model.txt"));

    let prepared = prepare(&args)?;
    if args.loss.loss == "mlogit" {
        warn_multi_best(&prepared.train);
    }
    let fitted = fit(&args, &prepared, true)?;

    save_model(&fitted.model, &model_out)?;
    let trace: String = fitted
        .report
        .risk_trace
        .iter()
        .enumerate()
        .map(|(k, r)| format!("{k}\t{r}\n"))
        .collect();
    let trace_path = sidecar(&model_out, "trace");
    fs::write(&trace_path, trace).with_context(|| format!("writing {}", trace_path.display()))?;
    let stats_path = sidecar(&model_out, "norm");
    match &prepared.stats {
        Some(stats) => save_stats(stats, &stats_path)?,
        None if stats_path.exists() => fs::remove_file(&stats_path)?,
        None => {}
    }

    for (k, v) in flag_entries(&args, &model_out, &fitted) {
        manifest.push(&k, v);
    }
    for (key, path) in [
        ("data", &args.data.data),
        ("queries", &args.data.queries),
        ("dev", &args.dev),
        ("dev-queries", &args.dev_queries),
    ] {
        if let Some(p) = path {
            manifest.push_checksum(key, p)?;
        }
    }
    manifest.push("seed", fitted.seed);
    manifest.push("result.iterations", fitted.report.iterations);
    manifest.push("result.final_risk", fitted.report.final_risk);
    manifest.push("result.termination", fitted.report.termination.name());
    let manifest_path = args.manifest.clone().unwrap_or_else(|| sidecar(&model_out, "manifest"));
    manifest.finish(Some(&manifest_path))?;

    println!(
        "iterations={} final_risk={} grad_norm={} termination={} lambda={}{} seed={}",
        fitted.report.iterations,
        fitted.report.final_risk,
        fitted.report.grad_norm,
        fitted.report.termination.name(),
        fitted.lambda,
        fitted.rho.map_or(String::new(), |r| format!(" rho={r}")),
        fitted.seed,
    );
    if let Some(dev) = &prepared.dev {
        println!("dev metric=err value={}", dev_err(&fitted.model, dev)?);
    }
    Ok(())
}
