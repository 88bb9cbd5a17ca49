use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Scalar};

/// Aggregation of member scores into a group-level (tie-aware) score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupAggregation {
    Min,
    Max,
    ArithmeticMean,
    /// `log((1/K) * sum(exp(f_j)))`
    GeometricMean,
}

impl GroupAggregation {
    pub const ALL: [GroupAggregation; 4] = [
        GroupAggregation::Min,
        GroupAggregation::Max,
        GroupAggregation::ArithmeticMean,
        GroupAggregation::GeometricMean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GroupAggregation::Min => "min",
            GroupAggregation::Max => "max",
            GroupAggregation::ArithmeticMean => "amean",
            GroupAggregation::GeometricMean => "gmean",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

pub fn group_score<T: Scalar>(aggregation: GroupAggregation, members: &[T]) -> Result<T> {
    group_score_grad(aggregation, members).map(|(v, _)| v)
}

/// Group score and its partial derivatives with respect to each member score.
/// For min and max the derivative goes to the first extremal member.
pub fn group_score_grad<T: Scalar>(
    aggregation: GroupAggregation,
    members: &[T],
) -> Result<(T, Vec<T>)> {
    if members.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let k = members.len();
    let mut grad = vec![T::zero(); k];
    let value = match aggregation {
        GroupAggregation::Min | GroupAggregation::Max => {
            let mut best = 0;
            for (j, &s) in members.iter().enumerate().skip(1) {
                let better = match aggregation {
                    GroupAggregation::Min => s < members[best],
                    _ => s > members[best],
                };
                if better {
                    best = j;
                }
            }
            grad[best] = T::one();
            members[best]
        }
        GroupAggregation::ArithmeticMean => {
            let kk = T::from_usize_lossy(k);
            grad.iter_mut().for_each(|g| *g = T::one() / kk);
            members.iter().copied().sum::<T>() / kk
        }
        GroupAggregation::GeometricMean => {
            let lse = log_sum_exp(members.iter().copied());
            for (g, &s) in grad.iter_mut().zip(members) {
                *g = (s - lse).exp();
            }
            lse - T::from_usize_lossy(k).ln()
        }
    };
    Ok((value, grad))
}

/// Distance from the nearest tie between the extremal member and another
/// member; zero means the min/max derivative is undefined here.
pub fn extremal_gap<T: Scalar>(aggregation: GroupAggregation, members: &[T]) -> T {
    if members.len() < 2 {
        return T::infinity();
    }
    let mut sorted = members.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    match aggregation {
        GroupAggregation::Min => sorted[1] - sorted[0],
        GroupAggregation::Max => sorted[sorted.len() - 1] - sorted[sorted.len() - 2],
        _ => T::infinity(),
    }
}
