use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankforge_core::data::SyntheticSpec;
use rankforge_core::optimizer::{grad_check, LossOptions, LOSS_NAMES};
use rankforge_core::probmodels::{exact_oracle, permutations, pl_log_prob, reverse_pl_log_prob, verify_bound};
use rankforge_core::{LossSpec, Model};

use crate::args::{GradcheckArgs, VerifyBoundArgs};
use crate::load::{load_dataset, require_data};
use crate::manifest::RunManifest;
use crate::train::{build_model, family, loss_spec, DEFAULT_RHO};

pub fn run_gradcheck(args: GradcheckArgs) -> Result<()> {
    let mut manifest = RunManifest::new("gradcheck");
    let loss = loss_spec(&args.loss)?;
    let family = family(&args.model, args.data.format)?;
    let data = require_data(&args.data)?;
    let dataset = load_dataset(data, args.data.format, args.data.queries.as_deref(), args.data.levels, None)?;
    let model = build_model(&args.model, family, &dataset, args.model.rho.unwrap_or(DEFAULT_RHO))?;
    let report = grad_check(&model, &dataset, &loss, args.lambda, args.points, args.h, args.seed)?;
    println!(
        "max_rel_error={:e} max_abs_error={:e} checked={} skipped={}",
        report.max_rel_error, report.max_abs_error, report.checked, report.skipped
    );
    manifest.push("flag.loss", &args.loss.loss);
    manifest.push("flag.functional", &args.model.functional);
    manifest.push("data", data.display());
    manifest.push_checksum("data", data)?;
    manifest.push("seed", args.seed);
    manifest.push("result.max_rel_error", report.max_rel_error);
    manifest.finish(args.manifest.as_deref())?;
    if report.max_rel_error >= args.tol {
        bail!("gradient check failed: relative error {:e} >= {:e}", report.max_rel_error, args.tol);
    }
    Ok(())
}

/// Largest `|sum of probabilities - 1|` over all orderings, for PL and reverse PL.
pub fn normalization_deviation(max_n: usize, vectors: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut pl, mut rpl) = (0.0f64, 0.0f64);
    for n in 2..=max_n {
        let perms = permutations(n);
        for _ in 0..vectors {
            let s: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
            let p: f64 = perms.iter().map(|o| pl_log_prob(&s, o).exp()).sum();
            let q: f64 = perms.iter().map(|o| reverse_pl_log_prob(&s, o).exp()).sum();
            pl = pl.max((p - 1.0).abs());
            rpl = rpl.max((q - 1.0).abs());
        }
    }
    (pl, rpl)
}

/// Gradient check of every loss with a linear model on a small synthetic set.
pub fn gradient_sweep(seed: u64) -> Result<Vec<(String, f64)>> {
    let data = SyntheticSpec::new(4, 6, 3, 0.3, seed).with_levels(3).generate::<f64>()?.dataset;
    let model = Model::linear(3);
    let mut out = Vec::new();
    for name in LOSS_NAMES {
        let loss = LossSpec::from_name(name, &LossOptions::default())?;
        let r = grad_check(&model, &data, &loss, 0.1, 3, 1e-5, seed)?;
        out.push((name.to_string(), r.max_rel_error));
    }
    Ok(out)
}

pub fn run_verify_bound(args: VerifyBoundArgs) -> Result<()> {
    let mut manifest = RunManifest::new("verify-bound");
    let trials = verify_bound(args.trials as usize, args.n, args.levels, args.seed, exact_oracle)?;
    let mut failures = 0;
    let mut min_slack = f64::INFINITY;
    for (k, t) in trials.iter().enumerate() {
        println!("trial={} slack={:e}{}", k + 1, t.slack, if t.violated() { " VIOLATED" } else { "" });
        min_slack = min_slack.min(t.slack);
        failures += usize::from(t.violated());
    }
    println!("check=bound trials={} violations={failures} min_slack={min_slack:e}", trials.len());

    let (pl, rpl) = normalization_deviation(5, 50, args.seed);
    let norm_ok = pl < 1e-10 && rpl < 1e-10;
    println!("check=pl_normalization max_deviation={pl:e}");
    println!("check=rpl_normalization max_deviation={rpl:e}");
    failures += usize::from(!norm_ok);

    for (name, err) in gradient_sweep(args.seed)? {
        let ok = err < 1e-5;
        println!("check=gradient loss={name} max_rel_error={err:e}{}", if ok { "" } else { " FAILED" });
        failures += usize::from(!ok);
    }

    manifest.push("flag.trials", args.trials);
    manifest.push("flag.n", args.n);
    manifest.push("flag.levels", args.levels);
    manifest.push("seed", args.seed);
    manifest.push("result.failures", failures);
    manifest.finish(args.manifest.as_deref())?;
    if failures > 0 {
        bail!("{failures} check(s) failed");
    }
    Ok(())
}
