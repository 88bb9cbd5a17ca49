//! Permutation and rating models over a query: Plackett-Luce in both
//! directions, group-level Plackett-Luce, and a pairwise Markov random field
//! over ratings with its pseudo-likelihood and pairwise upper bound.

mod mrf;
mod oracle;

pub use mrf::{
    mrf_exact_logloss, mrf_log_joint, mrf_psi, wpll_conditionals, wpll_loss, wub_loss,
    wub_pair_weight, Gamma, ENUMERATION_BUDGET,
};
pub use oracle::{
    bound_slack, exact_oracle, permutations, pl_log_prob, reverse_pl_log_prob, verify_bound,
    BoundTrial,
};

use crate::error::{Error, Result};
use crate::functionals::{group_score_grad, GroupAggregation};
use crate::losses::LossValueAndGrad;
use crate::scalar::{log_sum_exp, Scalar};

fn check_order<T>(n: usize, order: &[usize], weights: &[T]) -> Result<()> {
    if order.len() != n {
        return Err(Error::Length {
            expected: n,
            got: order.len(),
        });
    }
    if weights.len() != n {
        return Err(Error::Length {
            expected: n,
            got: weights.len(),
        });
    }
    let mut seen = vec![false; n];
    for &o in order {
        if o >= n || std::mem::replace(&mut seen[o], true) {
            return Err(Error::Dimension(format!("order is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Weighted Plackett-Luce negative log-likelihood of `order` (best first).
/// `weights` are indexed by object; the choice made at position `k` is
/// weighted by the weight of `order[k]`.
pub fn pl_loss<T: Scalar>(scores: &[T], order: &[usize], weights: &[T]) -> Result<LossValueAndGrad<T>> {
    let n = scores.len();
    check_order(n, order, weights)?;
    let mut out = LossValueAndGrad::zero(n);
    if n == 0 {
        return Ok(out);
    }
    // suffix log-sum-exp over the remaining objects
    let mut suffix = vec![T::neg_infinity(); n];
    let mut acc = T::neg_infinity();
    for k in (0..n).rev() {
        let f = scores[order[k]];
        acc = if acc == T::neg_infinity() {
            f
        } else {
            let m = acc.max(f);
            m + ((acc - m).exp() + (f - m).exp()).ln()
        };
        suffix[k] = acc;
    }
    for k in 0..n {
        let w = weights[order[k]];
        if w == T::zero() {
            continue;
        }
        out.value += w * (suffix[k] - scores[order[k]]);
        out.grad[order[k]] -= w;
        for &j in &order[k..] {
            out.grad[j] += w * (scores[j] - suffix[k]).exp();
        }
    }
    Ok(out)
}

/// Weighted reverse Plackett-Luce loss: objects are eliminated worst first
/// with probability proportional to `exp(-f)`.
pub fn reverse_pl_loss<T: Scalar>(
    scores: &[T],
    order: &[usize],
    weights: &[T],
) -> Result<LossValueAndGrad<T>> {
    let neg: Vec<T> = scores.iter().map(|&s| -s).collect();
    let reversed: Vec<usize> = order.iter().rev().copied().collect();
    let mut out = pl_loss(&neg, &reversed, weights)?;
    out.grad.iter_mut().for_each(|g| *g = -*g);
    Ok(out)
}

/// Plackett-Luce over rating groups ordered by descending rating, each group's
/// score being `aggregation` of its members' scores. `group_weights`, when
/// given, holds one weight per distinct rating in descending rating order.
/// A single group carries no ordering information and gives zero loss.
pub fn group_pl_loss<T: Scalar>(
    scores: &[T],
    ratings: &[u32],
    aggregation: GroupAggregation,
    group_weights: Option<&[T]>,
) -> Result<LossValueAndGrad<T>> {
    let n = scores.len();
    if ratings.len() != n {
        return Err(Error::Length {
            expected: n,
            got: ratings.len(),
        });
    }
    let mut levels: Vec<u32> = ratings.to_vec();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    let mut out = LossValueAndGrad::zero(n);
    if levels.len() < 2 {
        return Ok(out);
    }
    let g = levels.len();
    if let Some(w) = group_weights {
        if w.len() != g {
            return Err(Error::Length {
                expected: g,
                got: w.len(),
            });
        }
    }
    let members: Vec<Vec<usize>> = levels
        .iter()
        .map(|&l| (0..n).filter(|&i| ratings[i] == l).collect())
        .collect();
    let mut group_scores = Vec::with_capacity(g);
    let mut member_grads = Vec::with_capacity(g);
    for m in &members {
        let s: Vec<T> = m.iter().map(|&i| scores[i]).collect();
        let (v, d) = group_score_grad(aggregation, &s)?;
        group_scores.push(v);
        member_grads.push(d);
    }
    let unit = vec![T::one(); g];
    let order: Vec<usize> = (0..g).collect();
    let inner = pl_loss(&group_scores, &order, group_weights.unwrap_or(&unit))?;
    out.value = inner.value;
    for (k, m) in members.iter().enumerate() {
        for (&i, &d) in m.iter().zip(&member_grads[k]) {
            out.grad[i] += inner.grad[k] * d;
        }
    }
    Ok(out)
}

/// Unit-weight Plackett-Luce loss written directly as
/// `sum_k lse(remaining scores) - chosen score`.
pub fn pl_loss_naive<T: Scalar>(scores: &[T], order: &[usize]) -> T {
    (0..order.len())
        .map(|k| log_sum_exp(order[k..].iter().map(|&j| scores[j])) - scores[order[k]])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::true_order;

    fn fd_check(f: impl Fn(&[f64]) -> LossValueAndGrad<f64>, x: &[f64]) {
        let a = f(x);
        for k in 0..x.len() {
            let h = 1e-5;
            let mut p = x.to_vec();
            p[k] += h;
            let up = f(&p).value;
            p[k] -= 2.0 * h;
            let dn = f(&p).value;
            let fd = (up - dn) / (2.0 * h);
            let rel = (fd - a.grad[k]).abs() / a.grad[k].abs().max(1.0);
            assert!(rel < 1e-7, "k={k}: fd {fd} analytic {}", a.grad[k]);
        }
    }

    #[test]
    fn pl_examples() {
        let l = pl_loss(&[0.0f64, 0.0], &[0, 1], &[1.0, 1.0]).unwrap();
        assert!((l.value - 2f64.ln()).abs() < 1e-15);
        let l = pl_loss(&[1.0f64, 0.0, 0.0], &[0, 1, 2], &[1.0; 3]).unwrap();
        let expect = -(1f64.exp() / (1f64.exp() + 2.0)).ln() + 2f64.ln();
        assert!((l.value - expect).abs() < 1e-12);
        assert!((l.value - 1.244592).abs() < 1e-6);
    }

    #[test]
    fn pl_rejects_bad_inputs() {
        assert!(pl_loss(&[0.0f64, 0.0], &[0, 1], &[1.0]).is_err());
        assert!(pl_loss(&[0.0f64, 0.0], &[0, 0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn reverse_pl_examples() {
        let l = reverse_pl_loss(&[0.5f64, 0.5], &[1, 0], &[1.0, 1.0]).unwrap();
        assert!((l.value - 2f64.ln()).abs() < 1e-15);
        let s = [0.9f64, -0.3, 0.4];
        let order = [0, 2, 1];
        let a = pl_loss(&s, &order, &[1.0; 3]).unwrap().value;
        let b = reverse_pl_loss(&s, &order, &[1.0; 3]).unwrap().value;
        assert!((a - b).abs() > 1e-3, "{a} {b}");
    }

    #[test]
    fn pl_gradients() {
        let w = [0.5, 2.0, 1.0, 0.0, 3.0];
        let order = [3, 1, 4, 0, 2];
        fd_check(|s| pl_loss(s, &order, &w).unwrap(), &[0.3, -1.0, 2.0, 0.1, -0.4]);
        fd_check(|s| reverse_pl_loss(s, &order, &w).unwrap(), &[0.3, -1.0, 2.0, 0.1, -0.4]);
    }

    #[test]
    fn group_singletons_match_pl() {
        let s = [0.2f64, 1.1, -0.5, 0.7];
        let r = [3, 0, 2, 1];
        let order = true_order(&r);
        for agg in GroupAggregation::ALL {
            let g = group_pl_loss(&s, &r, agg, None).unwrap();
            let p = pl_loss(&s, &order, &[1.0; 4]).unwrap();
            assert!((g.value - p.value).abs() < 1e-12);
            for (a, b) in g.grad.iter().zip(&p.grad) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn group_equal_worths() {
        let l = group_pl_loss(&[0.3f64; 5], &[1, 0, 1, 0, 0], GroupAggregation::GeometricMean, None)
            .unwrap();
        assert!((l.value - 2f64.ln()).abs() < 1e-12);
        let single = group_pl_loss(&[0.3f64, 2.0], &[1, 1], GroupAggregation::Max, None).unwrap();
        assert_eq!(single, LossValueAndGrad::zero(2));
    }

    #[test]
    fn group_gradients() {
        let s = [0.2, 1.1, -0.5, 0.7, 0.05, -1.3];
        let r = [2, 0, 2, 1, 0, 1];
        for agg in GroupAggregation::ALL {
            fd_check(|x| group_pl_loss(x, &r, agg, Some(&[1.0, 0.5, 2.0])).unwrap(), &s);
        }
    }

    proptest::proptest! {
        #[test]
        fn naive_path_agrees(scores in proptest::collection::vec(-8.0f64..8.0, 1..9), seed in 0u64..1000) {
            let mut order: Vec<usize> = (0..scores.len()).collect();
            order.rotate_left(seed as usize % scores.len());
            let a = pl_loss(&scores, &order, &vec![1.0; scores.len()]).unwrap().value;
            let b = pl_loss_naive(&scores, &order);
            proptest::prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }

        #[test]
        fn shift_invariance(scores in proptest::collection::vec(-5.0f64..5.0, 2..8), c in -20.0f64..20.0) {
            let n = scores.len();
            let ratings: Vec<u32> = (0..n).map(|i| (i % 3) as u32).collect();
            let order = true_order(&ratings);
            let shifted: Vec<f64> = scores.iter().map(|s| s + c).collect();
            let w = vec![1.0; n];
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs());
            proptest::prop_assert!(close(pl_loss(&scores, &order, &w).unwrap().value, pl_loss(&shifted, &order, &w).unwrap().value));
            proptest::prop_assert!(close(reverse_pl_loss(&scores, &order, &w).unwrap().value, reverse_pl_loss(&shifted, &order, &w).unwrap().value));
            for agg in GroupAggregation::ALL {
                proptest::prop_assert!(close(group_pl_loss(&scores, &ratings, agg, None).unwrap().value, group_pl_loss(&shifted, &ratings, agg, None).unwrap().value));
            }
        }
    }
}
