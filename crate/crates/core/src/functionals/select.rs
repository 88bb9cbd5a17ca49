//! Pearson-correlation pre-filtering of second-order feature conjunctions.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pearson correlation of two equal-length sequences, clamped to `[-1, 1]`.
pub fn pearson<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::Length {
            expected: u.len(),
            got: v.len(),
        });
    }
    if u.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two observations"));
    }
    let n = T::from_usize_lossy(u.len());
    let mu = u.iter().copied().sum::<T>() / n;
    let mv = v.iter().copied().sum::<T>() / n;
    let (mut num, mut su, mut sv) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in u.iter().zip(v) {
        let (da, db) = (a - mu, b - mv);
        num += da * db;
        su += da * da;
        sv += db * db;
    }
    if su == T::zero() || sv == T::zero() {
        return Err(Error::UndefinedCorrelation("constant sequence"));
    }
    let c = num / (su.sqrt() * sv.sqrt());
    Ok(c.max(-T::one()).min(T::one()))
}

fn is_constant<T: Scalar>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// Selects feature pairs `(a, b)`, `1 <= a <= b <= m`, whose product column has
/// absolute Pearson correlation with the raw rating of at least `rho`. Only
/// features with non-zero variance are candidates; constant product columns
/// are dropped. Instances are visited in query-id order, so the result does not
/// depend on the order of queries in the dataset.
pub fn select_second_order<T: Scalar>(dataset: &Dataset<T>, rho: T) -> Result<Vec<(u32, u32)>> {
    let dim = dataset.combined_dim()?;
    if !(rho >= T::zero() && rho < T::one()) {
        return Err(Error::Config(format!("rho must lie in [0, 1), got {rho}")));
    }
    let mut queries: Vec<_> = dataset.queries.iter().collect();
    queries.sort_by(|a, b| a.id.cmp(&b.id));
    let rows: Vec<Vec<T>> = queries
        .iter()
        .flat_map(|q| q.instances.iter().map(|i| i.features.to_dense(dim)))
        .collect();
    let ratings: Vec<T> = queries
        .iter()
        .flat_map(|q| q.instances.iter().map(|i| T::from_u32(i.rating).unwrap()))
        .collect();
    if is_constant(&ratings) {
        return Ok(Vec::new());
    }
    let varying: Vec<usize> = (0..dim)
        .filter(|&k| !is_constant(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect();
    let mut out = Vec::new();
    let mut column = vec![T::zero(); rows.len()];
    for (ia, &a) in varying.iter().enumerate() {
        for &b in &varying[ia..] {
            for (c, r) in column.iter_mut().zip(&rows) {
                *c = r[a] * r[b];
            }
            if is_constant(&column) {
                continue;
            }
            let corr = pearson(&column, &ratings)?;
            if corr.abs() >= rho {
                out.push((a as u32 + 1, b as u32 + 1));
            }
        }
    }
    Ok(out)
}
