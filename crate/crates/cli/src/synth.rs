use std::fs;

use anyhow::{Context, Result};
use rankforge_core::data::{write_combined, SyntheticProfile, SyntheticSpec};

use crate::args::{Profile, SynthArgs};
use crate::manifest::RunManifest;

pub fn run(args: SynthArgs) -> Result<()> {
    let mut manifest = RunManifest::new("synth");
    let profile = match args.profile {
        Profile::Linear => SyntheticProfile::Linear,
        Profile::TwoTier => SyntheticProfile::TwoTier,
    };
    let spec = SyntheticSpec::new(args.num_queries, args.docs, args.dim, args.noise, args.seed)
        .with_levels(args.levels)
        .with_interactions(args.interactions, args.interaction_scale)
        .with_profile(profile);
    let synthetic = spec.generate::<f64>()?;
    let mut buf = Vec::new();
    write_combined(&synthetic.dataset, &mut buf)?;
    fs::write(&args.out, buf).with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(p) = &args.weights_out {
        let text: String = synthetic.planted_weights.iter().map(|w| format!("{w}\n")).collect();
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    for (k, v) in [
        ("num-queries", args.num_queries.to_string()),
        ("docs", args.docs.to_string()),
        ("dim", args.dim.to_string()),
        ("noise", args.noise.to_string()),
        ("levels", args.levels.to_string()),
        ("interactions", args.interactions.to_string()),
        ("interaction-scale", args.interaction_scale.to_string()),
        ("profile", format!("{:?}", args.profile).to_lowercase()),
        ("out", args.out.display().to_string()),
    ] {
        manifest.push(&format!("flag.{k}"), v);
    }
    manifest.push("seed", args.seed);
    manifest.push_checksum("out", &args.out)?;
    let path = args
        .manifest
        .clone()
        .unwrap_or_else(|| crate::load::sidecar(&args.out, "manifest"));
    manifest.finish(Some(&path))?;
    println!(
        "queries={} objects={} dim={} levels={}",
        synthetic.dataset.queries.len(),
        synthetic.dataset.num_instances(),
        args.dim,
        args.levels
    );
    Ok(())
}
