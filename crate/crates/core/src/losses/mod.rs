//! Query-level rank losses and their gradients with respect to object scores.

mod pairwise;
mod smooth;
mod weights;

pub use pairwise::{hinge_kink_distance, pairwise_loss, PairLossKind};
pub use smooth::{smooth_metric_loss, smooth_step, SmoothMetric};
pub use weights::{element_weight, element_weights, pair_weight, ElementWeightScheme, PairWeightScheme};

use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Scalar};

/// Loss value plus `d loss / d score_i` for every object of the query.
#[derive(Debug, Clone, PartialEq)]
pub struct LossValueAndGrad<T> {
    pub value: T,
    pub grad: Vec<T>,
}

impl<T: Scalar> LossValueAndGrad<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            value: T::zero(),
            grad: vec![T::zero(); n],
        }
    }
}

/// Negative log softmax mass of the best set:
/// `-log(sum_{i in best} exp f_i / sum_j exp f_j)`.
pub fn multiclass_logistic<T: Scalar>(scores: &[T], best: &[usize]) -> Result<LossValueAndGrad<T>> {
    if best.is_empty() {
        return Err(Error::EmptyBestSet);
    }
    if let Some(&b) = best.iter().find(|&&b| b >= scores.len()) {
        return Err(Error::Length {
            expected: scores.len(),
            got: b + 1,
        });
    }
    let lse_all = log_sum_exp(scores.iter().copied());
    let lse_best = log_sum_exp(best.iter().map(|&i| scores[i]));
    let mut grad: Vec<T> = scores.iter().map(|&f| (f - lse_all).exp()).collect();
    for &i in best {
        grad[i] -= (scores[i] - lse_best).exp();
    }
    Ok(LossValueAndGrad {
        value: (lse_all - lse_best).max(T::zero()),
        grad,
    })
}
