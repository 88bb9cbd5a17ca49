//! LETOR-style text ingestion and canonical serialization.
//!
//! Combined format, one instance per line:
//!
//! ```text
//! <rating> qid:<qid> <fid>:<val> ... [# comment]
//! ```
//!
//! Separate format uses a query file of `<qid> <fid>:<val> ...` lines and a
//! triples file identical to the combined format, whose feature list is the
//! object vector.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{Dataset, Instance, Query, Representation, SparseVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Label-set size. Defaults to max observed rating + 1.
    pub num_levels: Option<u32>,
    /// Feature dimension. Defaults to the largest feature id seen.
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SeparateParseOptions {
    pub num_levels: Option<u32>,
    pub query_dim: Option<usize>,
    pub object_dim: Option<usize>,
}

struct RatedLine<T> {
    rating: u32,
    qid: String,
    features: SparseVector<T>,
}

fn content(line: &str) -> &str {
    let line = line.strip_suffix('\r').unwrap_or(line);
    match line.find('#') {
        Some(p) => &line[..p],
        None => line,
    }
}

fn parse_features<'a, T: Scalar>(
    tokens: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<SparseVector<T>> {
    let mut pairs = Vec::new();
    for tok in tokens {
        let (fid, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected <fid>:<val>, found `{tok}`"),
        })?;
        let fid: u32 = fid.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad feature id `{fid}`"),
        })?;
        if fid == 0 {
            return Err(Error::Parse {
                line,
                message: "feature ids are 1-based".into(),
            });
        }
        let val: T = val.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad feature value `{val}`"),
        })?;
        if !val.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("non-finite feature value `{val}`"),
            });
        }
        pairs.push((fid, val));
    }
    SparseVector::from_pairs(pairs).map_err(|feature| Error::DuplicateFeature { line, feature })
}

fn parse_rated_line<T: Scalar>(text: &str, line: usize) -> Result<Option<RatedLine<T>>> {
    let mut tokens = content(text).split_whitespace();
    let Some(rating_tok) = tokens.next() else {
        return Ok(None);
    };
    let rating: u32 = rating_tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("rating must be a non-negative integer, found `{rating_tok}`"),
    })?;
    let qid = tokens
        .next()
        .and_then(|t| t.strip_prefix("qid:"))
        .filter(|q| !q.is_empty())
        .ok_or_else(|| Error::Parse {
            line,
            message: "missing qid:<qid> field".into(),
        })?;
    let features = parse_features(tokens, line)?;
    Ok(Some(RatedLine {
        rating,
        qid: qid.to_string(),
        features,
    }))
}

type Groups<T> = Vec<(String, Vec<Instance<T>>)>;

/// Groups rated lines by qid in order of first appearance, with the largest
/// rating and feature id seen.
fn group<T: Scalar>(reader: impl BufRead) -> Result<(Groups<T>, u32, u32)> {
    let mut groups: Groups<T> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut max_rating = 0;
    let mut max_fid = 0;
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let text = line?;
        let Some(parsed) = parse_rated_line::<T>(&text, line_no)? else {
            continue;
        };
        max_rating = max_rating.max(parsed.rating);
        max_fid = max_fid.max(parsed.features.max_id());
        let slot = *index.entry(parsed.qid.clone()).or_insert_with(|| {
            groups.push((parsed.qid.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(Instance {
            rating: parsed.rating,
            features: parsed.features,
        });
    }
    if groups.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((groups, max_rating, max_fid))
}

fn resolve_levels(requested: Option<u32>, max_rating: u32) -> Result<u32> {
    match requested {
        Some(l) if l <= max_rating => Err(Error::RatingOutOfRange {
            rating: max_rating,
            num_levels: l,
        }),
        Some(l) => Ok(l),
        None => Ok(max_rating + 1),
    }
}

fn resolve_dim(requested: Option<usize>, max_fid: u32, what: &str) -> Result<usize> {
    match requested {
        Some(d) if (max_fid as usize) > d => Err(Error::Dimension(format!(
            "{what} feature id {max_fid} exceeds declared dimension {d}"
        ))),
        Some(d) => Ok(d),
        None => Ok(max_fid as usize),
    }
}

/// Parses the combined (one vector per query-object pair) format.
pub fn parse_combined<T: Scalar>(reader: impl BufRead, opts: ParseOptions) -> Result<Dataset<T>> {
    let (groups, max_rating, max_fid) = group::<T>(reader)?;
    let num_levels = resolve_levels(opts.num_levels, max_rating)?;
    let dim = resolve_dim(opts.dim, max_fid, "combined")?;
    let queries = groups
        .into_iter()
        .map(|(id, instances)| Query {
            id,
            query_features: None,
            instances,
        })
        .collect();
    Dataset::new(queries, num_levels, Representation::Combined { dim })
}

/// Parses the separate representation from a query-vector file and a triples file.
pub fn parse_separate<T: Scalar>(
    query_reader: impl BufRead,
    triples_reader: impl BufRead,
    opts: SeparateParseOptions,
) -> Result<Dataset<T>> {
    let mut query_vecs: HashMap<String, SparseVector<T>> = HashMap::new();
    let mut max_qfid = 0;
    for (k, line) in query_reader.lines().enumerate() {
        let line_no = k + 1;
        let text = line?;
        let mut tokens = content(&text).split_whitespace();
        let Some(qid) = tokens.next() else { continue };
        let qid = qid.strip_prefix("qid:").unwrap_or(qid).to_string();
        let vec = parse_features(tokens, line_no)?;
        max_qfid = max_qfid.max(vec.max_id());
        if query_vecs.insert(qid.clone(), vec).is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("query `{qid}` defined twice"),
            });
        }
    }

    let (groups, max_rating, max_ofid) = group::<T>(triples_reader)?;
    let num_levels = resolve_levels(opts.num_levels, max_rating)?;
    let query_dim = resolve_dim(opts.query_dim, max_qfid, "query")?;
    let object_dim = resolve_dim(opts.object_dim, max_ofid, "object")?;
    let queries = groups
        .into_iter()
        .map(|(id, instances)| {
            let qv = query_vecs
                .get(&id)
                .cloned()
                .ok_or_else(|| Error::UnknownQuery(id.clone()))?;
            Ok(Query {
                id,
                query_features: Some(qv),
                instances,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(
        queries,
        num_levels,
        Representation::Separate {
            query_dim,
            object_dim,
        },
    )
}

fn write_features<T: Scalar>(out: &mut impl Write, v: &SparseVector<T>) -> std::io::Result<()> {
    for (fid, val) in v.iter() {
        write!(out, " {fid}:{val}")?;
    }
    Ok(())
}

/// Writes the canonical combined form (features ascending by id, shortest
/// round-trip decimal values). For separate datasets only the triples are written.
pub fn write_combined<T: Scalar>(dataset: &Dataset<T>, mut out: impl Write) -> Result<()> {
    for q in &dataset.queries {
        for inst in &q.instances {
            write!(out, "{} qid:{}", inst.rating, q.id)?;
            write_features(&mut out, &inst.features)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_separate<T: Scalar>(
    dataset: &Dataset<T>,
    mut query_out: impl Write,
    triples_out: impl Write,
) -> Result<()> {
    for q in &dataset.queries {
        let qv = q
            .query_features
            .as_ref()
            .ok_or(Error::UnsupportedRepresentation { expected: "separate" })?;
        write!(query_out, "{}", q.id)?;
        write_features(&mut query_out, qv)?;
        writeln!(query_out)?;
    }
    write_combined(dataset, triples_out)
}
