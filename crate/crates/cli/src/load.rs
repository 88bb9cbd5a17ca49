//! Dataset, model and sidecar file loading.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use rankforge_core::data::{
    apply_normalization, parse_combined, parse_separate, NormalizationStats, ParseOptions, Representation,
    SeparateParseOptions,
};
use rankforge_core::functionals::{read_model, write_model};
use rankforge_core::{Dataset, Error, Model};

use crate::args::{DataArgs, Format};

/// `path` with `.suffix` appended to its file name.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .with_context(|| format!("opening {}", path.display()))
}

/// Loads ranking data. `expected` pins the feature dimensions (features beyond
/// them are an error); otherwise they are inferred.
pub fn load_dataset(
    data: &Path,
    format: Format,
    queries: Option<&Path>,
    levels: Option<u32>,
    expected: Option<Representation>,
) -> Result<Dataset> {
    let dataset = match format {
        Format::Letor => {
            let dim = match expected {
                Some(Representation::Combined { dim }) => Some(dim),
                Some(_) => return Err(Error::UnsupportedRepresentation { expected: "separate" }.into()),
                None => None,
            };
            parse_combined(open(data)?, ParseOptions { num_levels: levels, dim })
        }
        Format::Separate => {
            let qpath = queries.ok_or_else(|| Error::Config("--format separate requires --queries".into()))?;
            let (query_dim, object_dim) = match expected {
                Some(Representation::Separate {
                    query_dim,
                    object_dim,
                }) => (Some(query_dim), Some(object_dim)),
                Some(_) => return Err(Error::UnsupportedRepresentation { expected: "combined" }.into()),
                None => (None, None),
            };
            parse_separate(
                open(qpath)?,
                open(data)?,
                SeparateParseOptions {
                    num_levels: levels,
                    query_dim,
                    object_dim,
                },
            )
        }
    };
    dataset.with_context(|| format!("loading {}", data.display()))
}

pub fn require_data(args: &DataArgs) -> Result<&Path> {
    args.data
        .as_deref()
        .ok_or_else(|| anyhow!(Error::Config("--data is required".into())))
}

pub fn load_model(path: &Path) -> Result<Model> {
    read_model(open(path)?).with_context(|| format!("reading model {}", path.display()))
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_model(model, &mut buf)?;
    std::fs::write(path, buf).with_context(|| format!("writing model {}", path.display()))
}

pub fn save_stats(stats: &NormalizationStats<f64>, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    stats.write(&mut buf)?;
    std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

/// Loads evaluation data for `model`, applying the training normalization
/// stored beside the model file if present.
pub fn load_for_model(model_path: &Path, model: &Model, args: &DataArgs) -> Result<Dataset> {
    let data = require_data(args)?;
    let dataset = load_dataset(data, args.format, args.queries.as_deref(), args.levels, Some(model.representation()))?;
    let stats_path = sidecar(model_path, "norm");
    if stats_path.exists() {
        let stats = NormalizationStats::read(open(&stats_path)?)
            .with_context(|| format!("reading {}", stats_path.display()))?;
        return Ok(apply_normalization(&dataset, &stats)?);
    }
    Ok(dataset)
}
