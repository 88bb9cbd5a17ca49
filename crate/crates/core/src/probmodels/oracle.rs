//! Brute-force reference computations for small queries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mrf::{mrf_exact_logloss, wub_loss};
use crate::error::{Error, Result};
use crate::losses::PairWeightScheme;
use crate::scalar::{log_sum_exp, Scalar};

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// `log P(order)` under Plackett-Luce with worths `exp(f)`.
pub fn pl_log_prob<T: Scalar>(scores: &[T], order: &[usize]) -> T {
    (0..order.len())
        .map(|k| scores[order[k]] - log_sum_exp(order[k..].iter().map(|&j| scores[j])))
        .sum()
}

/// `log Q(order)` under reverse Plackett-Luce: the last object is removed
/// first with probability proportional to `exp(-f)`.
pub fn reverse_pl_log_prob<T: Scalar>(scores: &[T], order: &[usize]) -> T {
    (0..order.len())
        .map(|k| -scores[order[k]] - log_sum_exp(order[..=k].iter().map(|&j| -scores[j])))
        .sum()
}

/// `wub + (N - 2) log |L| - exact`: nonnegative whenever the pairwise bound
/// holds.
pub fn bound_slack<T: Scalar>(
    scores: &[T],
    ratings: &[u32],
    gamma: T,
    num_levels: u32,
    exact: impl Fn(&[T], &[u32], T, u32) -> Result<T>,
) -> Result<T> {
    let n = scores.len();
    let wub = wub_loss(scores, ratings, gamma, num_levels, PairWeightScheme::Unit)?.value;
    let constant = T::of(n as f64 - 2.0) * T::from_usize_lossy(num_levels as usize).ln();
    Ok(wub + constant - exact(scores, ratings, gamma, num_levels)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTrial {
    pub scores: Vec<f64>,
    pub ratings: Vec<u32>,
    pub gamma: f64,
    pub exact: f64,
    pub slack: f64,
}

impl BoundTrial {
    pub fn violated(&self) -> bool {
        self.slack < -1e-12
    }
}

/// Draws `trials` random (scores, ratings, gamma) instances and records the
/// slack of the pairwise bound against `exact` for each.
pub fn verify_bound(
    trials: usize,
    n: usize,
    num_levels: u32,
    seed: u64,
    exact: impl Fn(&[f64], &[u32], f64, u32) -> Result<f64>,
) -> Result<Vec<BoundTrial>> {
    if trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    if n < 2 || num_levels < 2 {
        return Err(Error::Config("need at least two objects and two levels".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let scores: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let ratings: Vec<u32> = (0..n).map(|_| rng.random_range(0..num_levels)).collect();
            let gamma = rng.random_range(0.05..2.0);
            let value = exact(&scores, &ratings, gamma, num_levels)?;
            let slack = bound_slack(&scores, &ratings, gamma, num_levels, |_, _, _, _| Ok(value))?;
            Ok(BoundTrial {
                scores,
                ratings,
                gamma,
                exact: value,
                slack,
            })
        })
        .collect()
}

/// Default exact oracle for [`verify_bound`].
pub fn exact_oracle(scores: &[f64], ratings: &[u32], gamma: f64, num_levels: u32) -> Result<f64> {
    mrf_exact_logloss(scores, ratings, gamma, num_levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(3)[5], vec![2, 1, 0]);
    }

    #[test]
    fn probabilities_normalize() {
        let s = [0.3f64, -1.0, 2.2, 0.0];
        let total: f64 = permutations(4).iter().map(|p| pl_log_prob(&s, p).exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let total: f64 = permutations(4).iter().map(|p| reverse_pl_log_prob(&s, p).exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_holds_and_is_tight_for_pairs() {
        for trial in verify_bound(50, 2, 3, 4, exact_oracle).unwrap() {
            assert!(trial.slack.abs() < 1e-12);
        }
        assert!(verify_bound(50, 4, 2, 5, exact_oracle).unwrap().iter().all(|t| !t.violated()));
        assert!(verify_bound(0, 3, 2, 0, exact_oracle).is_err());
    }

    #[test]
    fn flipped_potential_sign_is_caught() {
        let broken = |s: &[f64], r: &[u32], g: f64, l: u32| mrf_exact_logloss(s, r, -g, l);
        let trials = verify_bound(50, 3, 2, 1, broken).unwrap();
        assert!(trials.iter().any(BoundTrial::violated));
    }
}
