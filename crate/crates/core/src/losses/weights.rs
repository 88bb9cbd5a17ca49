//! Element weights `W_i` and pair weights `V_ij` for decomposed losses.

use crate::error::{Error, Result};
use crate::metrics::err_grade;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementWeightScheme {
    /// `1`
    Unit,
    /// `r_i`
    Rating,
    /// `sqrt(r_i)`
    SqrtRating,
    /// `2^(r_i - 1) / 2^(|L| - 1)`
    ExpRating,
    /// `1 / pi_i`
    ReciprocalPosition,
    /// `1 / ln(1 + pi_i)`
    LogDiscount,
}

impl ElementWeightScheme {
    pub const ALL: [ElementWeightScheme; 6] = [
        ElementWeightScheme::Unit,
        ElementWeightScheme::Rating,
        ElementWeightScheme::SqrtRating,
        ElementWeightScheme::ExpRating,
        ElementWeightScheme::ReciprocalPosition,
        ElementWeightScheme::LogDiscount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementWeightScheme::Unit => "unit",
            ElementWeightScheme::Rating => "rating",
            ElementWeightScheme::SqrtRating => "sqrt",
            ElementWeightScheme::ExpRating => "expgain",
            ElementWeightScheme::ReciprocalPosition => "invpos",
            ElementWeightScheme::LogDiscount => "logdisc",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Weight of one object given its rating and true position (1-based).
pub fn element_weight<T: Scalar>(
    scheme: ElementWeightScheme,
    rating: u32,
    true_position: usize,
    num_levels: u32,
) -> T {
    let r = T::from_u32(rating).expect("rating fits scalar");
    let pos = T::from_usize_lossy(true_position);
    match scheme {
        ElementWeightScheme::Unit => T::one(),
        ElementWeightScheme::Rating => r,
        ElementWeightScheme::SqrtRating => r.sqrt(),
        ElementWeightScheme::ExpRating => {
            T::of(2f64.powi(rating as i32 - 1) / 2f64.powi(num_levels as i32 - 1))
        }
        ElementWeightScheme::ReciprocalPosition => T::one() / pos,
        ElementWeightScheme::LogDiscount => T::one() / pos.ln_1p(),
    }
}

/// Weights for every object of a query; positions are the true positions.
pub fn element_weights<T: Scalar>(
    scheme: ElementWeightScheme,
    ratings: &[u32],
    true_positions: &[usize],
    num_levels: u32,
) -> Vec<T> {
    ratings
        .iter()
        .zip(true_positions)
        .map(|(&r, &p)| element_weight(scheme, r, p, num_levels))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairWeightScheme {
    /// `1`
    Unit,
    /// `1 / N_q`
    InvQueryLength,
    /// `|r_i - r_j|`
    RatingDiff,
    /// `|r_i - r_j| / N_q`
    RatingDiffNorm,
    /// `(R_i - R_j)(eta_i - eta_j) / DCG_max`
    GainDiscountNorm,
    /// `(R_i - R_j)(eta_i - eta_j)`
    GainDiscount,
    /// `R_i - R_j`
    GainDiff,
    /// `(R_i - R_j) / N_q`
    GainDiffNorm,
}

impl PairWeightScheme {
    pub const ALL: [PairWeightScheme; 8] = [
        PairWeightScheme::Unit,
        PairWeightScheme::InvQueryLength,
        PairWeightScheme::RatingDiff,
        PairWeightScheme::RatingDiffNorm,
        PairWeightScheme::GainDiscountNorm,
        PairWeightScheme::GainDiscount,
        PairWeightScheme::GainDiff,
        PairWeightScheme::GainDiffNorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairWeightScheme::Unit => "unit",
            PairWeightScheme::InvQueryLength => "invq",
            PairWeightScheme::RatingDiff => "rdiff",
            PairWeightScheme::RatingDiffNorm => "rdiffq",
            PairWeightScheme::GainDiscountNorm => "gdn",
            PairWeightScheme::GainDiscount => "gd",
            PairWeightScheme::GainDiff => "gdiff",
            PairWeightScheme::GainDiffNorm => "gdiffq",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Whether the weight is a function of the ratings (directly or through
    /// true positions).
    pub fn uses_ratings(self) -> bool {
        !matches!(self, PairWeightScheme::Unit | PairWeightScheme::InvQueryLength)
    }
}

/// Weight of the pair `(i, j)` with `r_i > r_j`. Positions are true positions,
/// `ndcg_max` the query's untruncated ideal DCG.
#[allow(clippy::too_many_arguments)]
pub fn pair_weight<T: Scalar>(
    scheme: PairWeightScheme,
    ri: u32,
    rj: u32,
    pos_i: usize,
    pos_j: usize,
    query_len: usize,
    num_levels: u32,
    ndcg_max: T,
) -> Result<T> {
    if ri <= rj {
        return Err(Error::Orientation { ri, rj });
    }
    let nq = T::from_usize_lossy(query_len);
    let rdiff = T::from_u32(ri - rj).expect("rating fits scalar");
    let gdiff = err_grade::<T>(ri, num_levels) - err_grade::<T>(rj, num_levels);
    let eta = |p: usize| T::one() / T::from_usize_lossy(p).ln_1p();
    let gd = || gdiff * (eta(pos_i) - eta(pos_j));
    Ok(match scheme {
        PairWeightScheme::Unit => T::one(),
        PairWeightScheme::InvQueryLength => T::one() / nq,
        PairWeightScheme::RatingDiff => rdiff,
        PairWeightScheme::RatingDiffNorm => rdiff / nq,
        PairWeightScheme::GainDiscountNorm => gd() / ndcg_max,
        PairWeightScheme::GainDiscount => gd(),
        PairWeightScheme::GainDiff => gdiff,
        PairWeightScheme::GainDiffNorm => gdiff / nq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_examples() {
        assert_eq!(element_weight::<f64>(ElementWeightScheme::ReciprocalPosition, 2, 1, 5), 1.0);
        assert_eq!(element_weight::<f64>(ElementWeightScheme::ExpRating, 4, 3, 5), 0.5);
        assert_eq!(element_weight::<f64>(ElementWeightScheme::Rating, 0, 3, 5), 0.0);
        assert_eq!(element_weight::<f64>(ElementWeightScheme::SqrtRating, 4, 3, 5), 2.0);
        assert_eq!(
            element_weight::<f64>(ElementWeightScheme::LogDiscount, 1, 1, 5),
            1.0 / 2f64.ln()
        );
        assert_eq!(element_weight::<f64>(ElementWeightScheme::Unit, 0, 9, 5), 1.0);
    }

    #[test]
    fn pair_examples() {
        let w = |s, ri, rj, pi, pj, n| pair_weight::<f64>(s, ri, rj, pi, pj, n, 5, 2.0).unwrap();
        assert_eq!(w(PairWeightScheme::Unit, 1, 0, 1, 2, 4), 1.0);
        assert_eq!(w(PairWeightScheme::RatingDiffNorm, 3, 1, 1, 2, 4), 0.5);
        assert_eq!(w(PairWeightScheme::GainDiff, 4, 0, 1, 2, 4), 15.0 / 16.0);
        assert_eq!(w(PairWeightScheme::GainDiffNorm, 4, 0, 1, 2, 3), 15.0 / 48.0);
        assert_eq!(w(PairWeightScheme::InvQueryLength, 4, 0, 1, 2, 8), 0.125);
        let gd = w(PairWeightScheme::GainDiscount, 2, 1, 1, 3, 3);
        let hand = (3.0 / 16.0 - 1.0 / 16.0) * (1.0 / 2f64.ln() - 1.0 / 4f64.ln());
        assert!((gd - hand).abs() < 1e-15);
        assert!((w(PairWeightScheme::GainDiscountNorm, 2, 1, 1, 3, 3) - hand / 2.0).abs() < 1e-15);
        assert!(matches!(
            pair_weight::<f64>(PairWeightScheme::Unit, 1, 1, 1, 2, 2, 5, 1.0),
            Err(Error::Orientation { .. })
        ));
    }

    #[test]
    fn names_round_trip() {
        for s in ElementWeightScheme::ALL {
            assert_eq!(ElementWeightScheme::from_name(s.name()), Some(s));
        }
        for s in PairWeightScheme::ALL {
            assert_eq!(PairWeightScheme::from_name(s.name()), Some(s));
        }
    }
}
