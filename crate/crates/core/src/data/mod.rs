//! Ranking datasets: queries with rated objects in combined or separate
//! feature representation.

mod normalize;
mod parse;
mod synth;

pub use normalize::{apply_normalization, zscore_normalize, NormalizationStats, STATS_MAGIC};
pub use parse::{
    parse_combined, parse_separate, write_combined, write_separate, ParseOptions,
    SeparateParseOptions,
};
pub use synth::{synthesize, Synthetic, SyntheticProfile, SyntheticSpec};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse real vector keyed by 1-based feature id. Entries are kept sorted by id
/// and ids are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector<T> {
    entries: Vec<(u32, T)>,
}

impl<T: Scalar> SparseVector<T> {
    /// Builds a vector from `(id, value)` pairs in any order. On a repeated id
    /// the offending id is returned as the error.
    pub fn from_pairs(mut pairs: Vec<(u32, T)>) -> std::result::Result<Self, u32> {
        pairs.sort_by_key(|&(id, _)| id);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(w[0].0);
            }
        }
        if let Some(&(0, _)) = pairs.first() {
            return Err(0);
        }
        Ok(Self { entries: pairs })
    }

    /// Dense slice to sparse, dropping exact zeros. `dense[k]` is feature `k + 1`.
    pub fn from_dense(dense: &[T]) -> Self {
        let entries = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != T::zero())
            .map(|(k, &v)| (k as u32 + 1, v))
            .collect();
        Self { entries }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, T)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: u32) -> T {
        match self.entries.binary_search_by_key(&id, |&(k, _)| k) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => T::zero(),
        }
    }

    /// Largest feature id present, 0 when empty.
    pub fn max_id(&self) -> u32 {
        self.entries.last().map_or(0, |&(id, _)| id)
    }

    pub fn to_dense(&self, dim: usize) -> Vec<T> {
        let mut out = vec![T::zero(); dim];
        for &(id, v) in &self.entries {
            if let Some(slot) = out.get_mut(id as usize - 1) {
                *slot = v;
            }
        }
        out
    }

    /// Inner product against a dense vector indexed from feature 1. Ids beyond
    /// `dense.len()` contribute nothing.
    pub fn dot(&self, dense: &[T]) -> T {
        self.entries
            .iter()
            .filter_map(|&(id, v)| dense.get(id as usize - 1).map(|&w| w * v))
            .fold(T::zero(), |a, b| a + b)
    }
}

/// How features are attached to a query-object pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// One vector per pair, `dim` features.
    Combined { dim: usize },
    /// A query vector shared by the query's objects plus one object vector each.
    Separate { query_dim: usize, object_dim: usize },
}

impl Representation {
    pub fn is_combined(&self) -> bool {
        matches!(self, Representation::Combined { .. })
    }
}

/// One rated object. In the combined representation `features` is the
/// query-object vector; in the separate one it is the object vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    pub rating: u32,
    pub features: SparseVector<T>,
}

/// Borrowed view of a separate-representation instance.
#[derive(Debug, Clone, Copy)]
pub struct SeparateInstance<'a, T> {
    pub query_vec: &'a SparseVector<T>,
    pub object_vec: &'a SparseVector<T>,
    pub rating: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query<T> {
    pub id: String,
    /// Present only in the separate representation.
    pub query_features: Option<SparseVector<T>>,
    pub instances: Vec<Instance<T>>,
}

impl<T: Scalar> Query<T> {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn ratings(&self) -> Vec<u32> {
        self.instances.iter().map(|i| i.rating).collect()
    }

    pub fn separate(&self, index: usize) -> Option<SeparateInstance<'_, T>> {
        let q = self.query_features.as_ref()?;
        let inst = self.instances.get(index)?;
        Some(SeparateInstance {
            query_vec: q,
            object_vec: &inst.features,
            rating: inst.rating,
        })
    }

    /// True positions of the query's objects; see [`true_positions`].
    pub fn true_positions(&self) -> Vec<usize> {
        true_positions(&self.ratings())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub queries: Vec<Query<T>>,
    pub num_levels: u32,
    pub representation: Representation,
    pub normalization: Option<NormalizationStats<T>>,
}

impl<T: Scalar> Dataset<T> {
    /// Validates the invariants and assembles a dataset.
    pub fn new(
        queries: Vec<Query<T>>,
        num_levels: u32,
        representation: Representation,
    ) -> Result<Self> {
        if queries.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if num_levels == 0 {
            return Err(Error::Config("num_levels must be at least 1".into()));
        }
        for q in &queries {
            if q.instances.is_empty() {
                return Err(Error::Config(format!("query `{}` has no instances", q.id)));
            }
            for inst in &q.instances {
                if inst.rating >= num_levels {
                    return Err(Error::RatingOutOfRange {
                        rating: inst.rating,
                        num_levels,
                    });
                }
            }
            match representation {
                Representation::Combined { dim } => {
                    if q.query_features.is_some() {
                        return Err(Error::UnsupportedRepresentation { expected: "combined" });
                    }
                    check_dim(&q.instances, dim)?;
                }
                Representation::Separate {
                    query_dim,
                    object_dim,
                } => {
                    let qv = q
                        .query_features
                        .as_ref()
                        .ok_or(Error::UnsupportedRepresentation { expected: "separate" })?;
                    if qv.max_id() as usize > query_dim {
                        return Err(Error::Dimension(format!(
                            "query `{}` uses feature {} but query dimension is {query_dim}",
                            q.id,
                            qv.max_id()
                        )));
                    }
                    check_dim(&q.instances, object_dim)?;
                }
            }
        }
        Ok(Self {
            queries,
            num_levels,
            representation,
            normalization: None,
        })
    }

    pub fn num_instances(&self) -> usize {
        self.queries.iter().map(Query::len).sum()
    }

    /// Combined feature dimension, or an error for the separate representation.
    pub fn combined_dim(&self) -> Result<usize> {
        match self.representation {
            Representation::Combined { dim } => Ok(dim),
            Representation::Separate { .. } => {
                Err(Error::UnsupportedRepresentation { expected: "combined" })
            }
        }
    }

    /// Splits off queries by position: the first `n` and the rest.
    pub fn split_at(&self, n: usize) -> Result<(Self, Self)> {
        let (a, b) = self.queries.split_at(n.min(self.queries.len()));
        let mut left = Self::new(a.to_vec(), self.num_levels, self.representation)?;
        let mut right = Self::new(b.to_vec(), self.num_levels, self.representation)?;
        left.normalization = self.normalization.clone();
        right.normalization = self.normalization.clone();
        Ok((left, right))
    }
}

fn check_dim<T: Scalar>(instances: &[Instance<T>], dim: usize) -> Result<()> {
    for inst in instances {
        if inst.features.max_id() as usize > dim {
            return Err(Error::Dimension(format!(
                "feature {} exceeds dimension {dim}",
                inst.features.max_id()
            )));
        }
    }
    Ok(())
}

/// Positions `1..=N` of each object under a stable sort by descending rating;
/// equal ratings keep ascending index order.
pub fn true_positions(ratings: &[u32]) -> Vec<usize> {
    positions_from_order(&true_order(ratings))
}

/// Object indices listed best-first (the inverse of [`true_positions`]).
pub fn true_order(ratings: &[u32]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ratings.len()).collect();
    order.sort_by(|&a, &b| ratings[b].cmp(&ratings[a]));
    order
}

/// Inverts an ordering (`order[k]` = object at position `k + 1`) into positions.
pub fn positions_from_order(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (k, &obj) in order.iter().enumerate() {
        pos[obj] = k + 1;
    }
    pos
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn true_positions_examples() {
        assert_eq!(true_positions(&[0, 2, 1]), vec![3, 1, 2]);
        assert_eq!(true_positions(&[1, 1]), vec![1, 2]);
        assert_eq!(true_positions(&[4, 3, 2, 1, 0]), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn sparse_vector_rejects_duplicates_and_zero_ids() {
        assert_eq!(SparseVector::<f64>::from_pairs(vec![(1, 0.5), (1, 0.9)]), Err(1));
        assert_eq!(SparseVector::<f64>::from_pairs(vec![(0, 0.5)]), Err(0));
        let v = SparseVector::from_pairs(vec![(3, -1.0f64), (1, 0.5)]).unwrap();
        assert_eq!(v.iter().collect::<Vec<_>>(), vec![(1, 0.5), (3, -1.0)]);
        assert_eq!(v.get(2), 0.0);
        assert_eq!(v.to_dense(3), vec![0.5, 0.0, -1.0]);
        assert_eq!(v.dot(&[2.0, 7.0, 1.0]), 0.0);
    }

    #[test]
    fn dataset_rejects_out_of_range_rating() {
        let q = Query {
            id: "1".into(),
            query_features: None,
            instances: vec![Instance {
                rating: 3,
                features: SparseVector::<f64>::default(),
            }],
        };
        let err = Dataset::new(vec![q], 3, Representation::Combined { dim: 1 }).unwrap_err();
        assert!(matches!(err, Error::RatingOutOfRange { rating: 3, .. }));
    }

    proptest::proptest! {
        #[test]
        fn true_positions_is_a_permutation(ratings in proptest::collection::vec(0u32..5, 1..30)) {
            let mut pos = true_positions(&ratings);
            // higher rating never placed after lower rating
            for i in 0..ratings.len() {
                for j in 0..ratings.len() {
                    if ratings[i] > ratings[j] {
                        proptest::prop_assert!(pos[i] < pos[j]);
                    }
                }
            }
            pos.sort_unstable();
            proptest::prop_assert_eq!(pos, (1..=ratings.len()).collect::<Vec<_>>());
        }
    }
}
