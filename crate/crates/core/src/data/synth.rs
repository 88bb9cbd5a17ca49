//! Seeded synthetic ranking data with a planted scoring function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Dataset, Instance, Query, Representation, SparseVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How latent scores turn into ratings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SyntheticProfile {
    /// Ratings are per-query quantile bins of one latent score.
    #[default]
    Linear,
    /// The top two rating levels are assigned by the planted direction; the
    /// lower levels are ordered by a second, orthogonal direction. Relevance
    /// at the head of the list and ordering in the tail carry different
    /// signals, so the objects that matter for top-heavy metrics are a
    /// minority of the pairs.
    TwoTier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub num_queries: usize,
    pub docs_per_query: usize,
    pub dim: usize,
    pub noise_sd: f64,
    pub seed: u64,
    pub num_levels: u32,
    /// Number of planted second-order terms `c * x_a * x_b` (a < b).
    pub interactions: usize,
    /// Magnitude of each planted second-order coefficient.
    pub interaction_scale: f64,
    pub profile: SyntheticProfile,
}

impl SyntheticSpec {
    pub fn new(
        num_queries: usize,
        docs_per_query: usize,
        dim: usize,
        noise_sd: f64,
        seed: u64,
    ) -> Self {
        Self {
            num_queries,
            docs_per_query,
            dim,
            noise_sd,
            seed,
            num_levels: 5,
            interactions: 0,
            interaction_scale: 1.0,
            profile: SyntheticProfile::Linear,
        }
    }

    pub fn with_interactions(mut self, count: usize, scale: f64) -> Self {
        self.interactions = count;
        self.interaction_scale = scale;
        self
    }

    pub fn with_profile(mut self, profile: SyntheticProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_levels(mut self, num_levels: u32) -> Self {
        self.num_levels = num_levels;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Synthetic<T> {
    pub dataset: Dataset<T>,
    /// Unit-norm planted linear weights.
    pub planted_weights: Vec<T>,
    /// Planted second-order terms as 1-based `(a, b, coefficient)`.
    pub planted_pairs: Vec<(usize, usize, T)>,
    /// Noise-free planted score of every instance, per query.
    pub planted_scores: Vec<Vec<T>>,
}

fn unit_normal(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Quantile bins: the lowest-scored objects get rating 0. Ties in score keep
/// index order.
fn quantile_ratings(latent: &[f64], levels: u32, offset: u32) -> Vec<u32> {
    let n = latent.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| latent[a].total_cmp(&latent[b]).then(b.cmp(&a)));
    let mut out = vec![0; n];
    for (rank, &i) in idx.iter().enumerate() {
        out[i] = offset + ((rank * levels as usize) / n) as u32;
    }
    out
}

impl SyntheticSpec {
    pub fn generate<T: Scalar>(&self) -> Result<Synthetic<T>> {
        if self.dim == 0 {
            return Err(Error::Config("synthetic dimension must be positive".into()));
        }
        if self.num_queries == 0 || self.docs_per_query == 0 {
            return Err(Error::Config("synthetic sizes must be positive".into()));
        }
        if self.num_levels < 1 || (self.profile == SyntheticProfile::TwoTier && self.num_levels < 3)
        {
            return Err(Error::Config("too few rating levels for profile".into()));
        }
        let max_pairs = self.dim * (self.dim - 1) / 2;
        if self.interactions > max_pairs {
            return Err(Error::Config(format!(
                "{} interactions requested but only {max_pairs} distinct pairs exist",
                self.interactions
            )));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let weights = unit_normal(&mut rng, self.dim);
        let tail_dir = {
            // Gram-Schmidt against the planted direction.
            let mut v = unit_normal(&mut rng, self.dim);
            let proj: f64 = v.iter().zip(&weights).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(&weights).for_each(|(a, b)| *a -= proj * b);
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 0.0 {
                v.iter_mut().for_each(|x| *x /= n);
            }
            v
        };
        let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(self.interactions);
        while pairs.len() < self.interactions {
            let a = rng.random_range(0..self.dim);
            let b = rng.random_range(0..self.dim);
            let (a, b) = (a.min(b), a.max(b));
            if a == b || pairs.iter().any(|&(x, y, _)| (x, y) == (a, b)) {
                continue;
            }
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            pairs.push((a, b, sign * self.interaction_scale));
        }

        let mut queries = Vec::with_capacity(self.num_queries);
        let mut planted_scores = Vec::with_capacity(self.num_queries);
        for qi in 0..self.num_queries {
            let mut rows = Vec::with_capacity(self.docs_per_query);
            let mut latent = Vec::with_capacity(self.docs_per_query);
            let mut tail = Vec::with_capacity(self.docs_per_query);
            let mut clean = Vec::with_capacity(self.docs_per_query);
            for _ in 0..self.docs_per_query {
                let x: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
                let mut s: f64 = x.iter().zip(&weights).map(|(a, b)| a * b).sum();
                for &(a, b, c) in &pairs {
                    s += c * x[a] * x[b];
                }
                let noise: f64 = rng.sample(StandardNormal);
                clean.push(T::of(s));
                latent.push(s + self.noise_sd * noise);
                let t: f64 = x.iter().zip(&tail_dir).map(|(a, b)| a * b).sum();
                let noise: f64 = rng.sample(StandardNormal);
                tail.push(t + self.noise_sd * noise);
                rows.push(x);
            }
            let ratings = match self.profile {
                SyntheticProfile::Linear => quantile_ratings(&latent, self.num_levels, 0),
                SyntheticProfile::TwoTier => two_tier(&latent, &tail, self.num_levels),
            };
            let instances = rows
                .iter()
                .zip(ratings)
                .map(|(x, rating)| {
                    let dense: Vec<T> = x.iter().map(|&v| T::of(v)).collect();
                    Instance {
                        rating,
                        features: SparseVector::from_dense(&dense),
                    }
                })
                .collect();
            queries.push(Query {
                id: (qi + 1).to_string(),
                query_features: None,
                instances,
            });
            planted_scores.push(clean);
        }
        let dataset = Dataset::new(
            queries,
            self.num_levels,
            Representation::Combined { dim: self.dim },
        )?;
        Ok(Synthetic {
            dataset,
            planted_weights: weights.into_iter().map(T::of).collect(),
            planted_pairs: pairs
                .into_iter()
                .map(|(a, b, c)| (a + 1, b + 1, T::of(c)))
                .collect(),
            planted_scores,
        })
    }
}

/// Top fifth of the list (by `head`) takes the two highest levels; the rest is
/// binned into the remaining levels by `tail`.
fn two_tier(head: &[f64], tail: &[f64], levels: u32) -> Vec<u32> {
    let n = head.len();
    let top = (n / 5).max(1).min(n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| head[b].total_cmp(&head[a]).then(a.cmp(&b)));
    let (head_idx, tail_idx) = idx.split_at(top);
    let mut out = vec![0; n];
    let head_scores: Vec<f64> = head_idx.iter().map(|&i| head[i]).collect();
    for (&i, r) in head_idx.iter().zip(quantile_ratings(&head_scores, 2, levels - 2)) {
        out[i] = r;
    }
    if !tail_idx.is_empty() {
        let tail_scores: Vec<f64> = tail_idx.iter().map(|&i| tail[i]).collect();
        for (&i, r) in tail_idx.iter().zip(quantile_ratings(&tail_scores, levels - 2, 0)) {
            out[i] = r;
        }
    }
    out
}

/// Linear planted model: returns the dataset and the unit-norm planted weights.
pub fn synthesize<T: Scalar>(
    num_queries: usize,
    docs_per_query: usize,
    dim: usize,
    noise_sd: f64,
    seed: u64,
) -> Result<(Dataset<T>, Vec<T>)> {
    let s = SyntheticSpec::new(num_queries, docs_per_query, dim, noise_sd, seed).generate()?;
    Ok((s.dataset, s.planted_weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let (a, wa) = synthesize::<f64>(10, 8, 5, 0.0, 1).unwrap();
        let (b, wb) = synthesize::<f64>(10, 8, 5, 0.0, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(wa, wb);
        let (c, _) = synthesize::<f64>(10, 8, 5, 0.0, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn noiseless_planted_order_matches_ratings() {
        let s = SyntheticSpec::new(20, 13, 4, 0.0, 3).generate::<f64>().unwrap();
        for (q, scores) in s.dataset.queries.iter().zip(&s.planted_scores) {
            let r = q.ratings();
            for i in 0..r.len() {
                for j in 0..r.len() {
                    if scores[i] > scores[j] {
                        assert!(r[i] >= r[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn quantile_bins_are_balanced() {
        let s = SyntheticSpec::new(1, 20, 3, 0.0, 9).generate::<f64>().unwrap();
        let mut counts = [0; 5];
        for r in s.dataset.queries[0].ratings() {
            counts[r as usize] += 1;
        }
        assert_eq!(counts, [4; 5]);
    }

    #[test]
    fn two_tier_levels() {
        let s = SyntheticSpec::new(3, 20, 6, 0.0, 5)
            .with_profile(SyntheticProfile::TwoTier)
            .generate::<f64>()
            .unwrap();
        let mut r = s.dataset.queries[0].ratings();
        r.sort_unstable();
        assert_eq!(r.iter().filter(|&&x| x >= 3).count(), 4);
        assert_eq!(r.iter().filter(|&&x| x == 4).count(), 2);
        assert_eq!(*r.last().unwrap(), 4);
    }

    #[test]
    fn interactions_are_distinct_pairs() {
        let s = SyntheticSpec::new(2, 5, 4, 0.1, 11)
            .with_interactions(6, 0.5)
            .generate::<f64>()
            .unwrap();
        let mut keys: Vec<_> = s.planted_pairs.iter().map(|&(a, b, _)| (a, b)).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), 6);
        assert!(keys.iter().all(|&(a, b)| 1 <= a && a < b && b <= 4));
        assert!(SyntheticSpec::new(2, 5, 4, 0.1, 11).with_interactions(7, 0.5).generate::<f64>().is_err());
    }

    #[test]
    fn zero_dim_is_an_error() {
        assert!(synthesize::<f64>(1, 1, 0, 0.0, 0).is_err());
    }
}
