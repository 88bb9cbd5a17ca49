use super::{pair_weight, LossValueAndGrad, PairWeightScheme};
use crate::error::{Error, Result};
use crate::metrics::ideal_dcg;
use crate::scalar::{sigmoid, softplus, Scalar};

/// Pair loss `phi(m)` of the margin `m = f_i - f_j` for a pair with `o_i`
/// preferred over `o_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairLossKind {
    /// `(1 - m)^2`
    Quadratic,
    /// `max(0, 1 - m)`
    Hinge,
    /// `exp(-m)`
    Exponential,
    /// `log(1 + exp(-m))`
    Logistic,
}

impl PairLossKind {
    pub const ALL: [PairLossKind; 4] = [
        PairLossKind::Quadratic,
        PairLossKind::Hinge,
        PairLossKind::Exponential,
        PairLossKind::Logistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairLossKind::Quadratic => "quad",
            PairLossKind::Hinge => "hinge",
            PairLossKind::Exponential => "exp",
            PairLossKind::Logistic => "logit",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// `(phi(m), phi'(m))`. The hinge derivative at `m = 1` is taken as 0.
    pub fn eval<T: Scalar>(self, margin: T) -> (T, T) {
        let one = T::one();
        match self {
            PairLossKind::Quadratic => {
                let d = one - margin;
                (d * d, -(d + d))
            }
            PairLossKind::Hinge => {
                if margin < one {
                    (one - margin, -one)
                } else {
                    (T::zero(), T::zero())
                }
            }
            PairLossKind::Exponential => {
                // keep exp finite for badly scaled scores
                let cap = T::max_value().ln() - T::of(8.0);
                let e = (-margin).min(cap).exp();
                (e, -e)
            }
            PairLossKind::Logistic => (softplus(-margin), -sigmoid(-margin)),
        }
    }
}

/// `sum over pairs with r_i > r_j of V_ij * phi(f_i - f_j)`. `positions` are
/// the true positions used by position-dependent weights. A query whose
/// ratings are all equal contributes zero loss and zero gradient.
pub fn pairwise_loss<T: Scalar>(
    kind: PairLossKind,
    scheme: PairWeightScheme,
    scores: &[T],
    ratings: &[u32],
    positions: &[usize],
    num_levels: u32,
) -> Result<LossValueAndGrad<T>> {
    let n = scores.len();
    if ratings.len() != n || positions.len() != n {
        return Err(Error::Length {
            expected: n,
            got: ratings.len().min(positions.len()),
        });
    }
    let ndcg_max: T = ideal_dcg(ratings, None);
    let mut out = LossValueAndGrad::zero(n);
    for i in 0..n {
        for j in 0..n {
            if ratings[i] <= ratings[j] {
                continue;
            }
            let w = pair_weight(
                scheme,
                ratings[i],
                ratings[j],
                positions[i],
                positions[j],
                n,
                num_levels,
                ndcg_max,
            )?;
            if w == T::zero() {
                continue;
            }
            let (v, dv) = kind.eval(scores[i] - scores[j]);
            out.value += w * v;
            out.grad[i] += w * dv;
            out.grad[j] -= w * dv;
        }
    }
    Ok(out)
}

/// Smallest `|f_i - f_j - 1|` over preferred pairs: distance to the hinge kink.
pub fn hinge_kink_distance<T: Scalar>(scores: &[T], ratings: &[u32]) -> T {
    let mut best = T::infinity();
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if ratings[i] > ratings[j] {
                best = best.min((scores[i] - scores[j] - T::one()).abs());
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::true_positions;

    fn single_pair(kind: PairLossKind, margin: f64) -> f64 {
        pairwise_loss(kind, PairWeightScheme::Unit, &[margin, 0.0], &[1, 0], &[1, 2], 2)
            .unwrap()
            .value
    }

    #[test]
    fn table_values() {
        assert!((single_pair(PairLossKind::Logistic, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(single_pair(PairLossKind::Hinge, 1.0), 0.0);
        assert_eq!(single_pair(PairLossKind::Hinge, 0.0), 1.0);
        assert_eq!(single_pair(PairLossKind::Quadratic, 1.0), 0.0);
        assert_eq!(single_pair(PairLossKind::Exponential, 0.0), 1.0);
        assert!(single_pair(PairLossKind::Exponential, -1e6).is_finite());
    }

    #[test]
    fn hinge_subgradient_at_kink_is_zero() {
        let l = pairwise_loss(PairLossKind::Hinge, PairWeightScheme::Unit, &[1.0f64, 0.0], &[1, 0], &[1, 2], 2)
            .unwrap();
        assert_eq!(l.grad, vec![0.0, 0.0]);
    }

    #[test]
    fn degenerate_query_is_zero() {
        let l = pairwise_loss(PairLossKind::Logistic, PairWeightScheme::GainDiscountNorm, &[0.3f64, -1.0, 2.0], &[2, 2, 2], &[1, 2, 3], 5)
            .unwrap();
        assert_eq!(l, LossValueAndGrad::zero(3));
        let l = pairwise_loss(PairLossKind::Logistic, PairWeightScheme::GainDiscountNorm, &[0.3f64, -1.0], &[0, 0], &[1, 2], 5)
            .unwrap();
        assert_eq!(l.value, 0.0);
    }

    #[test]
    fn weight_scales_pair() {
        let l = pairwise_loss(PairLossKind::Logistic, PairWeightScheme::GainDiffNorm, &[0.0f64, 0.0], &[4, 0], &[1, 2], 5)
            .unwrap();
        assert!((l.value - 15.0 / 32.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let scores = [0.31, -1.2, 0.85, 2.0, -0.1, 0.47, -0.66, 1.3];
        let ratings = [2, 0, 1, 2, 0, 1, 1, 0];
        let pos = true_positions(&ratings);
        let h = 1e-5;
        for kind in PairLossKind::ALL {
            for scheme in PairWeightScheme::ALL {
                let f = |s: &[f64]| pairwise_loss(kind, scheme, s, &ratings, &pos, 3).unwrap();
                let a = f(&scores);
                for k in 0..scores.len() {
                    let mut p = scores.to_vec();
                    p[k] += h;
                    let up = f(&p).value;
                    p[k] -= 2.0 * h;
                    let fd = (up - f(&p).value) / (2.0 * h);
                    let rel = (fd - a.grad[k]).abs() / a.grad[k].abs().max(1.0);
                    assert!(rel < 1e-5, "{kind:?} {scheme:?} k={k}: {fd} vs {}", a.grad[k]);
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn nonnegative_shift_and_permutation_invariant(
            data in proptest::collection::vec((0u32..4, -5.0f64..5.0), 2..9),
            c in -10.0f64..10.0,
            rot in 0usize..8,
        ) {
            let (ratings, scores): (Vec<u32>, Vec<f64>) = data.iter().cloned().unzip();
            let pos = true_positions(&ratings);
            let shifted: Vec<f64> = scores.iter().map(|s| s + c).collect();
            let n = ratings.len();
            let rot = rot % n;
            let mut rr = ratings.clone();
            rr.rotate_left(rot);
            let mut rs = scores.clone();
            rs.rotate_left(rot);
            for kind in PairLossKind::ALL {
                for scheme in PairWeightScheme::ALL {
                    let a = pairwise_loss(kind, scheme, &scores, &ratings, &pos, 4).unwrap();
                    proptest::prop_assert!(a.value >= 0.0 && a.value.is_finite());
                    let b = pairwise_loss(kind, scheme, &shifted, &ratings, &pos, 4).unwrap();
                    proptest::prop_assert!((a.value - b.value).abs() <= 1e-9 * (1.0 + a.value));
                    if scheme == PairWeightScheme::Unit {
                        let p = pairwise_loss(kind, scheme, &rs, &rr, &true_positions(&rr), 4).unwrap();
                        proptest::prop_assert!((a.value - p.value).abs() <= 1e-9 * (1.0 + a.value));
                    }
                }
            }
        }
    }
}
