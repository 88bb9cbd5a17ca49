//! Smooth surrogates of MRR, NDCG and ERR built from soft positions
//! `pi~_i = 1 + sum_{j != i} sigmoid(s * (f_j - f_i))`.

use super::LossValueAndGrad;
use crate::error::{Error, Result};
use crate::metrics::{best_index, err_grade, gain, ideal_dcg};
use crate::scalar::{sigmoid, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmoothMetric {
    Mrr,
    Ndcg,
    Err,
}

impl SmoothMetric {
    pub const ALL: [SmoothMetric; 3] = [SmoothMetric::Mrr, SmoothMetric::Ndcg, SmoothMetric::Err];

    pub fn name(self) -> &'static str {
        match self {
            SmoothMetric::Mrr => "mrr",
            SmoothMetric::Ndcg => "ndcg",
            SmoothMetric::Err => "err",
        }
    }
}

/// Soft indicator of `f_i > f_j`: `sigmoid(scale * (f_i - f_j))`.
#[inline]
pub fn smooth_step<T: Scalar>(fi: T, fj: T, scale: T) -> T {
    sigmoid(scale * (fi - fj))
}

struct SoftPositions<T> {
    /// `step[j][i] = sigmoid(s (f_j - f_i))`, the soft event "j above i".
    step: Vec<Vec<T>>,
    pos: Vec<T>,
}

impl<T: Scalar> SoftPositions<T> {
    fn new(scores: &[T], scale: T) -> Self {
        let n = scores.len();
        let mut step = vec![vec![T::zero(); n]; n];
        let mut pos = vec![T::one(); n];
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    let s = smooth_step(scores[j], scores[i], scale);
                    step[j][i] = s;
                    pos[i] += s;
                }
            }
        }
        Self { step, pos }
    }

    /// d step[j][i] / d f_j; the derivative wrt f_i is its negation.
    #[inline]
    fn dstep(&self, j: usize, i: usize, scale: T) -> T {
        let s = self.step[j][i];
        scale * s * (T::one() - s)
    }

    /// Adds `sum_i upstream[i] * d pos_i / d f` into `grad`.
    fn backprop(&self, upstream: &[T], scale: T, grad: &mut [T]) {
        let n = self.pos.len();
        for i in 0..n {
            if upstream[i] == T::zero() {
                continue;
            }
            for j in 0..n {
                if j != i {
                    let d = upstream[i] * self.dstep(j, i, scale);
                    grad[j] += d;
                    grad[i] -= d;
                }
            }
        }
    }
}

/// `1 - M~` for a smoothed metric `M~`. `scale` is the sigmoid temperature
/// (1 gives the plain logistic step).
///
/// * MRR: `1 - 1 / pi~_best`, best = highest rating, lowest index on ties.
/// * NDCG: untruncated, normalized by the discrete ideal DCG; all-zero
///   ratings give loss 0.
/// * ERR: `1 - sum_i R_i / pi~_i * prod_{j != i} (1 - step(j above i) R_j)`.
pub fn smooth_metric_loss<T: Scalar>(
    metric: SmoothMetric,
    scores: &[T],
    ratings: &[u32],
    num_levels: u32,
    scale: T,
) -> Result<LossValueAndGrad<T>> {
    let n = scores.len();
    if ratings.len() != n {
        return Err(Error::Length {
            expected: n,
            got: ratings.len(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if let Some(&r) = ratings.iter().find(|&&r| r >= num_levels) {
        return Err(Error::RatingOutOfRange {
            rating: r,
            num_levels,
        });
    }
    let soft = SoftPositions::new(scores, scale);
    let mut out = LossValueAndGrad::zero(n);
    let mut upstream = vec![T::zero(); n];
    match metric {
        SmoothMetric::Mrr => {
            let best = best_index(ratings).expect("non-empty");
            let p = soft.pos[best];
            out.value = T::one() - T::one() / p;
            upstream[best] = T::one() / (p * p);
            soft.backprop(&upstream, scale, &mut out.grad);
        }
        SmoothMetric::Ndcg => {
            let ideal: T = ideal_dcg(ratings, None);
            if ideal == T::zero() {
                return Ok(out);
            }
            let ln2 = T::LN_2();
            let mut dcg = T::zero();
            for i in 0..n {
                let g: T = gain(ratings[i]);
                if g == T::zero() {
                    continue;
                }
                let l = soft.pos[i].ln_1p();
                dcg += g * ln2 / l;
                upstream[i] = g * ln2 / ((T::one() + soft.pos[i]) * l * l * ideal);
            }
            out.value = T::one() - dcg / ideal;
            soft.backprop(&upstream, scale, &mut out.grad);
        }
        SmoothMetric::Err => {
            let grade: Vec<T> = ratings.iter().map(|&r| err_grade(r, num_levels)).collect();
            let mut total = T::zero();
            for i in 0..n {
                if grade[i] == T::zero() {
                    continue;
                }
                let mut prod = T::one();
                for j in (0..n).filter(|&j| j != i) {
                    prod *= T::one() - soft.step[j][i] * grade[j];
                }
                let term = grade[i] * prod / soft.pos[i];
                total += term;
                // d(-term)/d pos_i
                upstream[i] = term / soft.pos[i];
                // d(-term)/d step[j][i] = term * R_j / (1 - step R_j)
                for j in (0..n).filter(|&j| j != i) {
                    if grade[j] == T::zero() {
                        continue;
                    }
                    let coef = term * grade[j] / (T::one() - soft.step[j][i] * grade[j]);
                    let d = coef * soft.dstep(j, i, scale);
                    out.grad[j] += d;
                    out.grad[i] -= d;
                }
            }
            out.value = T::one() - total;
            soft.backprop(&upstream, scale, &mut out.grad);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_values() {
        assert_eq!(smooth_step(0.4f64, 0.4, 1.0), 0.5);
        assert!(smooth_step(40.0f64, 0.0, 1.0) > 1.0 - 1e-15);
        assert!((smooth_step(3f64.ln(), 0.0, 1.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn equal_scores_give_half_positions() {
        let soft = SoftPositions::new(&[0.2f64, 0.2], 1.0);
        assert_eq!(soft.pos, vec![1.5, 1.5]);
        let l = smooth_metric_loss(SmoothMetric::Mrr, &[0.2f64, 0.2], &[1, 0], 2, 1.0).unwrap();
        assert!((l.value - (1.0 - 1.0 / 1.5)).abs() < 1e-15);
    }

    #[test]
    fn all_zero_ratings_ndcg_is_zero_loss() {
        let l = smooth_metric_loss(SmoothMetric::Ndcg, &[0.1f64, 2.0], &[0, 0], 3, 1.0).unwrap();
        assert_eq!(l, LossValueAndGrad::zero(2));
    }

    #[test]
    fn rating_out_of_range() {
        assert!(smooth_metric_loss(SmoothMetric::Err, &[0.0f64], &[3], 3, 1.0).is_err());
    }

    fn central_diff(metric: SmoothMetric, scores: &[f64], ratings: &[u32], k: usize) -> f64 {
        let h = 1e-5;
        let mut p = scores.to_vec();
        p[k] += h;
        let up = smooth_metric_loss(metric, &p, ratings, 5, 1.3).unwrap().value;
        p[k] -= 2.0 * h;
        let dn = smooth_metric_loss(metric, &p, ratings, 5, 1.3).unwrap().value;
        (up - dn) / (2.0 * h)
    }

    #[test]
    fn gradients_match_finite_differences() {
        let scores = [0.3, -1.2, 0.8, 2.0, -0.1, 0.05];
        let ratings = [2, 0, 4, 1, 3, 0];
        for metric in SmoothMetric::ALL {
            let l = smooth_metric_loss(metric, &scores, &ratings, 5, 1.3).unwrap();
            for k in 0..scores.len() {
                let fd = central_diff(metric, &scores, &ratings, k);
                let rel = (fd - l.grad[k]).abs() / l.grad[k].abs().max(1.0);
                assert!(rel < 1e-8, "{metric:?} k={k}: {fd} vs {}", l.grad[k]);
            }
        }
    }
}
