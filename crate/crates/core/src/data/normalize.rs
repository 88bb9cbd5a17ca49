use std::io::{BufRead, Write};

use super::{Dataset, Instance, Query, SparseVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Per-feature mean and population standard deviation of a training set.
/// A zero `std` marks a constant column, which normalizes to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats<T> {
    pub mean: Vec<T>,
    pub std: Vec<T>,
}

impl<T: Scalar> NormalizationStats<T> {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    fn transform(&self, features: &SparseVector<T>) -> SparseVector<T> {
        let dense = features.to_dense(self.dim());
        let out: Vec<T> = dense
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&x, (&m, &s))| if s == T::zero() { T::zero() } else { (x - m) / s })
            .collect();
        SparseVector::from_dense(&out)
    }
}

/// First line of a serialized statistics file.
pub const STATS_MAGIC: &str = "rankforge-norm";

impl<T: Scalar> NormalizationStats<T> {
    /// `rankforge-norm 1 <dim>` followed by one `<mean> <std>` line per feature.
    pub fn write(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{STATS_MAGIC} 1 {}", self.dim())?;
        for (m, s) in self.mean.iter().zip(&self.std) {
            writeln!(out, "{m} {s}")?;
        }
        Ok(())
    }

    pub fn read(input: impl BufRead) -> Result<Self> {
        let bad = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| bad(1, "empty statistics file"))??;
        let dim: usize = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            [magic, "1", dim] if *magic == STATS_MAGIC => dim.parse().map_err(|_| bad(1, "bad dimension"))?,
            _ => return Err(bad(1, "not a normalization statistics file")),
        };
        let mut mean = Vec::with_capacity(dim);
        let mut std = Vec::with_capacity(dim);
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace().map(str::parse::<T>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(m)), Some(Ok(s)), None) => {
                    mean.push(m);
                    std.push(s);
                }
                _ => return Err(bad(k + 2, "expected '<mean> <std>'")),
            }
        }
        if mean.len() != dim {
            return Err(Error::Length {
                expected: dim,
                got: mean.len(),
            });
        }
        Ok(Self { mean, std })
    }
}

fn column_stats<T: Scalar>(dataset: &Dataset<T>, dim: usize) -> NormalizationStats<T> {
    let n = T::from_usize_lossy(dataset.num_instances());
    let mut mean = vec![T::zero(); dim];
    for inst in dataset.queries.iter().flat_map(|q| &q.instances) {
        for (id, v) in inst.features.iter() {
            mean[id as usize - 1] += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    // Two-pass variance; implicit zeros contribute mean^2 each.
    let mut sq = vec![T::zero(); dim];
    let mut nnz = vec![0usize; dim];
    for inst in dataset.queries.iter().flat_map(|q| &q.instances) {
        for (id, v) in inst.features.iter() {
            let k = id as usize - 1;
            let d = v - mean[k];
            sq[k] += d * d;
            nnz[k] += 1;
        }
    }
    let total = dataset.num_instances();
    let std = (0..dim)
        .map(|k| {
            let zeros = T::from_usize_lossy(total - nnz[k]);
            let var = (sq[k] + zeros * mean[k] * mean[k]) / n;
            let s = var.sqrt();
            if s <= T::epsilon() * (T::one() + mean[k].abs()) {
                T::zero()
            } else {
                s
            }
        })
        .collect();
    NormalizationStats { mean, std }
}

/// Z-score normalizes every feature column over all instances of `dataset`,
/// using the population standard deviation. Returns the normalized dataset and
/// the statistics for reuse on held-out data.
pub fn zscore_normalize<T: Scalar>(
    dataset: &Dataset<T>,
) -> Result<(Dataset<T>, NormalizationStats<T>)> {
    let dim = dataset.combined_dim()?;
    if dataset.num_instances() == 0 {
        return Err(Error::EmptyDataset);
    }
    let stats = column_stats(dataset, dim);
    let out = apply_normalization(dataset, &stats)?;
    Ok((out, stats))
}

/// Applies previously computed statistics (typically from the training split).
pub fn apply_normalization<T: Scalar>(
    dataset: &Dataset<T>,
    stats: &NormalizationStats<T>,
) -> Result<Dataset<T>> {
    let dim = dataset.combined_dim()?;
    if dim > stats.dim() {
        return Err(Error::Dimension(format!(
            "dataset has {dim} features but statistics cover {}",
            stats.dim()
        )));
    }
    let queries = dataset
        .queries
        .iter()
        .map(|q| Query {
            id: q.id.clone(),
            query_features: None,
            instances: q
                .instances
                .iter()
                .map(|inst| Instance {
                    rating: inst.rating,
                    features: stats.transform(&inst.features),
                })
                .collect(),
        })
        .collect();
    let mut out = Dataset::new(
        queries,
        dataset.num_levels,
        super::Representation::Combined { dim: stats.dim() },
    )?;
    out.normalization = Some(stats.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{parse_combined, ParseOptions, Representation};

    fn column(values: &[f64]) -> Dataset<f64> {
        let text: String = values
            .iter()
            .map(|v| format!("0 qid:1 1:{v}\n"))
            .collect();
        parse_combined(text.as_bytes(), ParseOptions { num_levels: None, dim: Some(1) }).unwrap()
    }

    fn values(d: &Dataset<f64>) -> Vec<f64> {
        d.queries[0].instances.iter().map(|i| i.features.get(1)).collect()
    }

    #[test]
    fn stats_round_trip() {
        let (_, stats) = zscore_normalize(&column(&[1.0, 2.5, 3.1])).unwrap();
        let mut buf = Vec::new();
        stats.write(&mut buf).unwrap();
        assert_eq!(NormalizationStats::<f64>::read(buf.as_slice()).unwrap(), stats);
        assert!(NormalizationStats::<f64>::read("nope\n".as_bytes()).is_err());
    }

    #[test]
    fn one_two_three() {
        let (d, stats) = zscore_normalize(&column(&[1.0, 2.0, 3.0])).unwrap();
        let expect = [-1.224744871391589, 0.0, 1.224744871391589];
        for (a, b) in values(&d).iter().zip(expect) {
            assert!((a - b).abs() < 1e-4);
        }
        assert_eq!(stats.mean, vec![2.0]);
        assert!((stats.std[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let (d, stats) = zscore_normalize(&column(&[5.0, 5.0, 5.0])).unwrap();
        assert_eq!(values(&d), vec![0.0, 0.0, 0.0]);
        assert_eq!(stats.std, vec![0.0]);
    }

    #[test]
    fn implicit_zeros_count() {
        // 1:3 on one line, absent on the other: column (3, 0)
        let d: Dataset<f64> =
            parse_combined("0 qid:1 1:3 2:1\n1 qid:1 2:1\n".as_bytes(), Default::default()).unwrap();
        let (_, stats) = zscore_normalize(&d).unwrap();
        assert_eq!(stats.mean, vec![1.5, 1.0]);
        assert_eq!(stats.std, vec![1.5, 0.0]);
    }

    #[test]
    fn separate_is_rejected() {
        let d: Dataset<f64> = crate::data::parse_separate(
            "1 1:1\n".as_bytes(),
            "0 qid:1 1:1\n".as_bytes(),
            Default::default(),
        )
        .unwrap();
        assert!(matches!(
            zscore_normalize(&d),
            Err(Error::UnsupportedRepresentation { .. })
        ));
    }

    #[test]
    fn reuse_on_test_split() {
        let (_, stats) = zscore_normalize(&column(&[1.0, 2.0, 3.0])).unwrap();
        let test = apply_normalization(&column(&[2.0, 4.0]), &stats).unwrap();
        let v = values(&test);
        assert_eq!(v[0], 0.0);
        assert!((v[1] - 2.0 / (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(test.representation, Representation::Combined { dim: 1 });
    }

    proptest::proptest! {
        #[test]
        fn idempotent_and_standardized(
            cols in proptest::collection::vec(proptest::collection::vec(-100.0f64..100.0, 3), 2..40)
        ) {
            let text: String = cols
                .iter()
                .map(|r| format!("0 qid:1 1:{} 2:{} 3:{}\n", r[0], r[1], r[2]))
                .collect();
            let raw: Dataset<f64> = parse_combined(
                text.as_bytes(),
                ParseOptions { num_levels: None, dim: Some(3) },
            ).unwrap();
            let (once, stats) = zscore_normalize(&raw).unwrap();
            let (twice, _) = zscore_normalize(&once).unwrap();
            let n = cols.len() as f64;
            for k in 1..=3u32 {
                let a: Vec<f64> = once.queries[0].instances.iter().map(|i| i.features.get(k)).collect();
                let b: Vec<f64> = twice.queries[0].instances.iter().map(|i| i.features.get(k)).collect();
                if stats.std[k as usize - 1] == 0.0 {
                    continue;
                }
                let mean = a.iter().sum::<f64>() / n;
                let var = a.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                proptest::prop_assert!(mean.abs() < 1e-9);
                proptest::prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
                for (x, y) in a.iter().zip(&b) {
                    proptest::prop_assert!((x - y).abs() < 1e-9);
                }
            }
        }
    }
}
