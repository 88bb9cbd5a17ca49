use rayon::prelude::*;

use crate::data::{true_order, Dataset, Query};
use crate::error::{Error, Result};
use crate::functionals::{extremal_gap, GroupAggregation, Model};
use crate::losses::{
    element_weights, hinge_kink_distance, multiclass_logistic, pairwise_loss, smooth_metric_loss,
    ElementWeightScheme, LossValueAndGrad, PairLossKind, PairWeightScheme, SmoothMetric,
};
use crate::probmodels::{group_pl_loss, pl_loss, reverse_pl_loss, wpll_loss, wub_loss, wub_pair_weight, Gamma};
use crate::scalar::Scalar;

/// Names accepted by [`LossSpec::from_name`].
pub const LOSS_NAMES: [&str; 13] = [
    "mlogit",
    "smooth-mrr",
    "smooth-ndcg",
    "smooth-err",
    "pair-quad",
    "pair-hinge",
    "pair-exp",
    "pair-logit",
    "wpl",
    "rpl",
    "gpl",
    "wpll",
    "wub",
];

/// Per-query loss with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossSpec<T> {
    MulticlassLogistic,
    Smooth { metric: SmoothMetric, scale: T },
    Pairwise { kind: PairLossKind, weights: PairWeightScheme },
    PlackettLuce { weights: ElementWeightScheme },
    ReversePlackettLuce { weights: ElementWeightScheme },
    GroupPlackettLuce { aggregation: GroupAggregation },
    PseudoLikelihood { weights: ElementWeightScheme, gamma: Gamma<T> },
    PairwiseBound { weights: PairWeightScheme, gamma: Gamma<T> },
}

/// Secondary settings consulted by [`LossSpec::from_name`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossOptions<T> {
    pub element_weights: ElementWeightScheme,
    pub pair_weights: PairWeightScheme,
    pub aggregation: GroupAggregation,
    pub gamma: Gamma<T>,
    pub scale: T,
}

impl<T: Scalar> Default for LossOptions<T> {
    fn default() -> Self {
        Self {
            element_weights: ElementWeightScheme::Unit,
            pair_weights: PairWeightScheme::Unit,
            aggregation: GroupAggregation::GeometricMean,
            gamma: Gamma::Auto,
            scale: T::one(),
        }
    }
}

impl<T: Scalar> LossSpec<T> {
    pub fn from_name(name: &str, opts: &LossOptions<T>) -> Result<Self> {
        let spec = match name {
            "mlogit" => LossSpec::MulticlassLogistic,
            "smooth-mrr" | "smooth-ndcg" | "smooth-err" => LossSpec::Smooth {
                metric: match name {
                    "smooth-mrr" => SmoothMetric::Mrr,
                    "smooth-ndcg" => SmoothMetric::Ndcg,
                    _ => SmoothMetric::Err,
                },
                scale: opts.scale,
            },
            "pair-quad" | "pair-hinge" | "pair-exp" | "pair-logit" => LossSpec::Pairwise {
                kind: PairLossKind::from_name(&name[5..]).expect("listed kind"),
                weights: opts.pair_weights,
            },
            "wpl" => LossSpec::PlackettLuce {
                weights: opts.element_weights,
            },
            "rpl" => LossSpec::ReversePlackettLuce {
                weights: opts.element_weights,
            },
            "gpl" => LossSpec::GroupPlackettLuce {
                aggregation: opts.aggregation,
            },
            "wpll" => LossSpec::PseudoLikelihood {
                weights: opts.element_weights,
                gamma: opts.gamma,
            },
            "wub" => LossSpec::PairwiseBound {
                weights: opts.pair_weights,
                gamma: opts.gamma,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown loss '{other}'; expected one of {}",
                    LOSS_NAMES.join(", ")
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossSpec::MulticlassLogistic => "mlogit",
            LossSpec::Smooth { metric, .. } => match metric {
                SmoothMetric::Mrr => "smooth-mrr",
                SmoothMetric::Ndcg => "smooth-ndcg",
                SmoothMetric::Err => "smooth-err",
            },
            LossSpec::Pairwise { kind, .. } => match kind {
                PairLossKind::Quadratic => "pair-quad",
                PairLossKind::Hinge => "pair-hinge",
                PairLossKind::Exponential => "pair-exp",
                PairLossKind::Logistic => "pair-logit",
            },
            LossSpec::PlackettLuce { .. } => "wpl",
            LossSpec::ReversePlackettLuce { .. } => "rpl",
            LossSpec::GroupPlackettLuce { .. } => "gpl",
            LossSpec::PseudoLikelihood { .. } => "wpll",
            LossSpec::PairwiseBound { .. } => "wub",
        }
    }

    /// Rejects hyperparameter combinations that make no sense for the loss.
    pub fn validate(&self) -> Result<()> {
        match *self {
            LossSpec::PairwiseBound { weights, gamma } => {
                wub_pair_weight::<T>(weights, 1)?;
                check_gamma(gamma)
            }
            LossSpec::PseudoLikelihood { gamma, .. } => check_gamma(gamma),
            LossSpec::Smooth { scale, .. } if !(scale > T::zero() && scale.is_finite()) => {
                Err(Error::Config(format!("sigmoid scale must be positive, got {scale}")))
            }
            _ => Ok(()),
        }
    }

    /// Loss and score gradient for one query.
    pub fn query_loss(&self, scores: &[T], query: &Query<T>, num_levels: u32) -> Result<LossValueAndGrad<T>> {
        let ratings = query.ratings();
        let n = ratings.len();
        match *self {
            LossSpec::MulticlassLogistic => {
                let top = ratings.iter().copied().max().ok_or(Error::EmptyBestSet)?;
                let best: Vec<usize> = (0..n).filter(|&i| ratings[i] == top).collect();
                multiclass_logistic(scores, &best)
            }
            LossSpec::Smooth { metric, scale } => smooth_metric_loss(metric, scores, &ratings, num_levels, scale),
            LossSpec::Pairwise { kind, weights } => {
                pairwise_loss(kind, weights, scores, &ratings, &query.true_positions(), num_levels)
            }
            LossSpec::PlackettLuce { weights } | LossSpec::ReversePlackettLuce { weights } => {
                let w = element_weights(weights, &ratings, &query.true_positions(), num_levels);
                let order = true_order(&ratings);
                if matches!(self, LossSpec::PlackettLuce { .. }) {
                    pl_loss(scores, &order, &w)
                } else {
                    reverse_pl_loss(scores, &order, &w)
                }
            }
            LossSpec::GroupPlackettLuce { aggregation } => group_pl_loss(scores, &ratings, aggregation, None),
            LossSpec::PseudoLikelihood { weights, gamma } => {
                let w = element_weights(weights, &ratings, &query.true_positions(), num_levels);
                wpll_loss(scores, &ratings, gamma.resolve(n), num_levels, &w)
            }
            LossSpec::PairwiseBound { weights, gamma } => {
                wub_loss(scores, &ratings, gamma.resolve(n), num_levels, weights)
            }
        }
    }

    /// Whether the loss has points of non-differentiability in the scores.
    pub fn has_kinks(&self) -> bool {
        matches!(
            self,
            LossSpec::Pairwise {
                kind: PairLossKind::Hinge,
                ..
            } | LossSpec::GroupPlackettLuce {
                aggregation: GroupAggregation::Min | GroupAggregation::Max
            }
        )
    }

    /// Which smooth piece of the loss is active at `scores`. Two score
    /// vectors with equal signatures lie on the same differentiable piece.
    pub fn piece_signature(&self, scores: &[T], ratings: &[u32]) -> Vec<usize> {
        match *self {
            LossSpec::Pairwise {
                kind: PairLossKind::Hinge,
                ..
            } => {
                let mut sig = Vec::new();
                for i in 0..scores.len() {
                    for j in 0..scores.len() {
                        if ratings[i] > ratings[j] {
                            sig.push(usize::from(scores[i] - scores[j] < T::one()));
                        }
                    }
                }
                sig
            }
            LossSpec::GroupPlackettLuce { aggregation } if self.has_kinks() => {
                let mut levels: Vec<u32> = ratings.to_vec();
                levels.sort_unstable();
                levels.dedup();
                levels
                    .iter()
                    .map(|&l| {
                        let members = (0..scores.len()).filter(|&i| ratings[i] == l);
                        let pick = |acc: Option<usize>, i: usize| match acc {
                            Some(b)
                                if (aggregation == GroupAggregation::Min && scores[b] <= scores[i])
                                    || (aggregation == GroupAggregation::Max && scores[b] >= scores[i]) =>
                            {
                                Some(b)
                            }
                            _ => Some(i),
                        };
                        members.fold(None, pick).unwrap_or(usize::MAX)
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Distance of `scores` from the nearest non-differentiable point.
    pub fn kink_distance(&self, scores: &[T], ratings: &[u32]) -> T {
        match *self {
            LossSpec::Pairwise {
                kind: PairLossKind::Hinge,
                ..
            } => hinge_kink_distance(scores, ratings),
            LossSpec::GroupPlackettLuce { aggregation } if self.has_kinks() => {
                let mut levels: Vec<u32> = ratings.to_vec();
                levels.sort_unstable();
                levels.dedup();
                levels
                    .iter()
                    .map(|&l| {
                        let m: Vec<T> = (0..scores.len()).filter(|&i| ratings[i] == l).map(|i| scores[i]).collect();
                        extremal_gap(aggregation, &m)
                    })
                    .fold(T::infinity(), T::min)
            }
            _ => T::infinity(),
        }
    }
}

fn check_gamma<T: Scalar>(gamma: Gamma<T>) -> Result<()> {
    match gamma {
        Gamma::Fixed(g) if !(g > T::zero() && g.is_finite()) => {
            Err(Error::Config(format!("gamma must be positive, got {g}")))
        }
        _ => Ok(()),
    }
}

/// Regularized empirical risk of a model family on a dataset:
/// mean query loss plus `(lambda / 2) * |theta|^2` over penalized parameters.
#[derive(Debug, Clone)]
pub struct Objective<'a, T> {
    template: Model<T>,
    dataset: &'a Dataset<T>,
    loss: LossSpec<T>,
    lambda: T,
    mask: Vec<bool>,
    bit_exact: bool,
}

impl<'a, T: Scalar> Objective<'a, T> {
    pub fn new(model: &Model<T>, dataset: &'a Dataset<T>, loss: LossSpec<T>, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero()) {
            return Err(Error::Config(format!("lambda must be nonnegative, got {lambda}")));
        }
        if dataset.queries.is_empty() {
            return Err(Error::EmptyDataset);
        }
        loss.validate()?;
        model.check_compatible(&dataset.representation)?;
        Ok(Self {
            template: model.clone(),
            dataset,
            loss,
            lambda,
            mask: model.penalty_mask(),
            bit_exact: false,
        })
    }

    /// Forces a fixed, sequential summation order over queries.
    pub fn bit_exact(mut self, on: bool) -> Self {
        self.bit_exact = on;
        self
    }

    pub fn num_params(&self) -> usize {
        self.mask.len()
    }

    pub fn loss(&self) -> &LossSpec<T> {
        &self.loss
    }

    pub fn dataset(&self) -> &Dataset<T> {
        self.dataset
    }

    pub fn model_at(&self, theta: &[T]) -> Result<Model<T>> {
        self.template.with_params(theta)
    }

    fn penalty(&self, theta: &[T]) -> T {
        let sq: T = theta
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(&t, _)| t * t)
            .sum();
        self.lambda * sq / T::of(2.0)
    }

    fn query_term(&self, model: &Model<T>, query: &Query<T>, grad: Option<&mut [T]>) -> Result<T> {
        let scores = model.score_query(query)?;
        let lvg = self.loss.query_loss(&scores, query, self.dataset.num_levels)?;
        if let Some(g) = grad {
            model.backprop_query(query, &lvg.grad, g)?;
        }
        Ok(lvg.value)
    }

    pub fn value(&self, theta: &[T]) -> Result<T> {
        let model = self.model_at(theta)?;
        let queries = &self.dataset.queries;
        let losses: Vec<T> = if self.bit_exact {
            queries
                .iter()
                .map(|q| self.query_term(&model, q, None))
                .collect::<Result<_>>()?
        } else {
            queries
                .par_iter()
                .map(|q| self.query_term(&model, q, None))
                .collect::<Result<_>>()?
        };
        let d = T::from_usize_lossy(queries.len());
        Ok(losses.into_iter().sum::<T>() / d + self.penalty(theta))
    }

    pub fn value_and_grad(&self, theta: &[T]) -> Result<(T, Vec<T>)> {
        let model = self.model_at(theta)?;
        let p = theta.len();
        let queries = &self.dataset.queries;
        let (total, mut grad) = if self.bit_exact {
            let mut grad = vec![T::zero(); p];
            let mut total = T::zero();
            for q in queries {
                total += self.query_term(&model, q, Some(&mut grad))?;
            }
            (total, grad)
        } else {
            queries
                .par_iter()
                .try_fold(
                    || (T::zero(), vec![T::zero(); p]),
                    |(acc, mut g), q| {
                        let v = self.query_term(&model, q, Some(&mut g))?;
                        Ok::<_, Error>((acc + v, g))
                    },
                )
                .try_reduce(
                    || (T::zero(), vec![T::zero(); p]),
                    |(a, mut ga), (b, gb)| {
                        ga.iter_mut().zip(gb).for_each(|(x, y)| *x += y);
                        Ok((a + b, ga))
                    },
                )?
        };
        let d = T::from_usize_lossy(queries.len());
        for ((g, &t), &m) in grad.iter_mut().zip(theta).zip(&self.mask) {
            *g /= d;
            if m {
                *g += self.lambda * t;
            }
        }
        Ok((total / d + self.penalty(theta), grad))
    }

    /// Per-query piece signatures of the loss at `theta`.
    pub fn piece_signature(&self, theta: &[T]) -> Result<Vec<Vec<usize>>> {
        let model = self.model_at(theta)?;
        self.dataset
            .queries
            .iter()
            .map(|q| Ok(self.loss.piece_signature(&model.score_query(q)?, &q.ratings())))
            .collect()
    }
}

/// Regularized risk of `model` on `dataset`.
pub fn risk<T: Scalar>(model: &Model<T>, dataset: &Dataset<T>, loss: &LossSpec<T>, lambda: T) -> Result<T> {
    Objective::new(model, dataset, *loss, lambda)?.value(&model.params())
}
