//! Evaluation-time rank metrics: MRR, NDCG@T and ERR.
//!
//! Predicted positions come from a stable descending sort of the scores, with
//! equal scores ordered by ascending object index. With distinct scores this
//! coincides with `1 + #{j : f_j > f_i}`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::{positions_from_order, Dataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Metric cutoffs reported by default.
pub const DEFAULT_CUTOFFS: [usize; 3] = [1, 5, 10];

pub fn predicted_positions<T: Scalar>(scores: &[T]) -> Result<Vec<usize>> {
    Ok(positions_from_order(&predicted_order(scores)?))
}

/// Object indices listed from highest to lowest score.
pub fn predicted_order<T: Scalar>(scores: &[T]) -> Result<Vec<usize>> {
    if scores.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::NonFinite(format!("score {bad}")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite"));
    Ok(order)
}

/// Index of the best object: highest rating, lowest index among ties.
pub fn best_index(ratings: &[u32]) -> Option<usize> {
    let max = *ratings.iter().max()?;
    ratings.iter().position(|&r| r == max)
}

#[inline]
pub fn gain<T: Scalar>(rating: u32) -> T {
    T::of(2f64.powi(rating as i32) - 1.0)
}

#[inline]
fn discount<T: Scalar>(position: usize) -> T {
    T::one() / (T::one() + T::from_usize_lossy(position)).log2()
}

/// Ideal DCG over the top `cutoff` objects (`None` = untruncated).
pub fn ideal_dcg<T: Scalar>(ratings: &[u32], cutoff: Option<usize>) -> T {
    let mut sorted = ratings.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let t = cutoff.unwrap_or(sorted.len()).min(sorted.len());
    sorted[..t]
        .iter()
        .enumerate()
        .map(|(k, &r)| gain::<T>(r) * discount::<T>(k + 1))
        .sum()
}

/// Reciprocal predicted position of the best object of one query.
pub fn reciprocal_rank<T: Scalar>(ratings: &[u32], positions: &[usize]) -> Result<T> {
    let best = best_index(ratings).ok_or(Error::EmptyDataset)?;
    Ok(T::one() / T::from_usize_lossy(positions[best]))
}

/// Mean reciprocal rank over a dataset, one score vector per query.
pub fn mrr<T: Scalar>(dataset: &Dataset<T>, scores_per_query: &[Vec<T>]) -> Result<T> {
    if dataset.queries.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_lengths(dataset, scores_per_query)?;
    let mut total = T::zero();
    for (q, s) in dataset.queries.iter().zip(scores_per_query) {
        total += reciprocal_rank(&q.ratings(), &predicted_positions(s)?)?;
    }
    Ok(total / T::from_usize_lossy(dataset.queries.len()))
}

/// NDCG at cutoff `t` (truncated to N). Queries whose ratings are all zero
/// score 1.
pub fn ndcg_at<T: Scalar>(ratings: &[u32], positions: &[usize], t: usize) -> Result<T> {
    if t == 0 {
        return Err(Error::Config("NDCG cutoff must be at least 1".into()));
    }
    check_permutation(positions, ratings.len())?;
    let t = t.min(ratings.len());
    let ideal: T = ideal_dcg(ratings, Some(t));
    if ideal == T::zero() {
        return Ok(T::one());
    }
    // Summed in position order, like the ideal DCG, so the ideal ordering
    // yields exactly 1.
    let mut by_pos = vec![0u32; ratings.len()];
    for (&r, &p) in ratings.iter().zip(positions) {
        by_pos[p - 1] = r;
    }
    let dcg: T = by_pos[..t]
        .iter()
        .enumerate()
        .map(|(k, &r)| gain::<T>(r) * discount::<T>(k + 1))
        .sum();
    Ok(dcg / ideal)
}

/// Satisfaction probability of a rating: `(2^r - 1) / 2^(L-1)`.
pub fn err_grade<T: Scalar>(rating: u32, num_levels: u32) -> T {
    gain::<T>(rating) / T::of(2f64.powi(num_levels as i32 - 1))
}

/// Expected reciprocal rank under the cascade model.
pub fn err<T: Scalar>(ratings: &[u32], positions: &[usize], num_levels: u32) -> Result<T> {
    if num_levels == 0 {
        return Err(Error::Config("num_levels must be at least 1".into()));
    }
    if let Some(&r) = ratings.iter().find(|&&r| r >= num_levels) {
        return Err(Error::RatingOutOfRange {
            rating: r,
            num_levels,
        });
    }
    check_permutation(positions, ratings.len())?;
    let mut by_pos = vec![0u32; ratings.len()];
    for (&r, &p) in ratings.iter().zip(positions) {
        by_pos[p - 1] = r;
    }
    let mut not_stopped = T::one();
    let mut total = T::zero();
    for (k, &r) in by_pos.iter().enumerate() {
        let grade = err_grade::<T>(r, num_levels);
        total += not_stopped * grade / T::from_usize_lossy(k + 1);
        not_stopped *= T::one() - grade;
    }
    Ok(total)
}

fn check_permutation(positions: &[usize], n: usize) -> Result<()> {
    if positions.len() != n {
        return Err(Error::Length {
            expected: n,
            got: positions.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in positions {
        if p == 0 || p > n || std::mem::replace(&mut seen[p - 1], true) {
            return Err(Error::Config("positions are not a permutation of 1..N".into()));
        }
    }
    Ok(())
}

fn check_lengths<T: Scalar>(dataset: &Dataset<T>, scores: &[Vec<T>]) -> Result<()> {
    if scores.len() != dataset.queries.len() {
        return Err(Error::Length {
            expected: dataset.queries.len(),
            got: scores.len(),
        });
    }
    for (q, s) in dataset.queries.iter().zip(scores) {
        if q.len() != s.len() {
            return Err(Error::Length {
                expected: q.len(),
                got: s.len(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryMetrics<T> {
    pub query_id: String,
    pub mrr: T,
    pub ndcg_at: BTreeMap<usize, T>,
    pub err: T,
}

/// Averaged and per-query metrics. Averages are the arithmetic mean of the
/// per-query values.
#[derive(Debug, Clone, PartialEq)]
pub struct RankMetricReport<T> {
    pub mrr: T,
    pub ndcg_at: BTreeMap<usize, T>,
    pub err: T,
    pub per_query: Vec<QueryMetrics<T>>,
}

/// Computes every metric for every query. Queries are evaluated in parallel
/// and reduced sequentially in dataset order.
pub fn evaluate<T: Scalar>(
    dataset: &Dataset<T>,
    scores_per_query: &[Vec<T>],
    cutoffs: &[usize],
) -> Result<RankMetricReport<T>> {
    if dataset.queries.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_lengths(dataset, scores_per_query)?;
    let per_query = dataset
        .queries
        .par_iter()
        .zip(scores_per_query.par_iter())
        .map(|(q, s)| {
            let ratings = q.ratings();
            let pos = predicted_positions(s)?;
            let ndcg = cutoffs
                .iter()
                .map(|&t| Ok((t, ndcg_at(&ratings, &pos, t)?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            Ok(QueryMetrics {
                query_id: q.id.clone(),
                mrr: reciprocal_rank(&ratings, &pos)?,
                ndcg_at: ndcg,
                err: err(&ratings, &pos, dataset.num_levels)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = T::from_usize_lossy(per_query.len());
    let mean = |f: &dyn Fn(&QueryMetrics<T>) -> T| per_query.iter().map(f).sum::<T>() / n;
    let ndcg_at = cutoffs
        .iter()
        .map(|&t| (t, mean(&|m| m.ndcg_at[&t])))
        .collect();
    Ok(RankMetricReport {
        mrr: mean(&|m| m.mrr),
        ndcg_at,
        err: mean(&|m| m.err),
        per_query,
    })
}
