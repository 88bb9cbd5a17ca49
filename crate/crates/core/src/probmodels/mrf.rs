use crate::error::{Error, Result};
use crate::losses::{LossValueAndGrad, PairWeightScheme};
use crate::scalar::{log_sum_exp, Scalar};

/// Largest number of rating configurations `|L|^N` enumerated exactly.
pub const ENUMERATION_BUDGET: usize = 1_000_000;

/// Pair-potential scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma<T> {
    /// `2 / (N (N - 1))` for a query of `N` objects.
    Auto,
    Fixed(T),
}

impl<T: Scalar> Gamma<T> {
    pub fn resolve(self, n: usize) -> T {
        match self {
            Gamma::Fixed(g) => g,
            Gamma::Auto if n < 2 => T::one(),
            Gamma::Auto => T::of(2.0) / T::from_usize_lossy(n * (n - 1)),
        }
    }
}

fn sign<T: Scalar>(a: u32, b: u32) -> T {
    match a.cmp(&b) {
        std::cmp::Ordering::Greater => T::one(),
        std::cmp::Ordering::Less => -T::one(),
        std::cmp::Ordering::Equal => T::zero(),
    }
}

/// `exp(gamma * sign(r_i - r_j) * (f_i - f_j))`.
pub fn mrf_psi<T: Scalar>(ri: u32, rj: u32, fi: T, fj: T, gamma: T) -> T {
    (gamma * sign::<T>(ri, rj) * (fi - fj)).exp()
}

fn check_inputs<T: Scalar>(scores: &[T], ratings: &[u32], num_levels: u32) -> Result<()> {
    if ratings.len() != scores.len() {
        return Err(Error::Length {
            expected: scores.len(),
            got: ratings.len(),
        });
    }
    if num_levels < 2 {
        return Err(Error::Config("at least two rating levels are required".into()));
    }
    if let Some(&r) = ratings.iter().find(|&&r| r >= num_levels) {
        return Err(Error::RatingOutOfRange {
            rating: r,
            num_levels,
        });
    }
    Ok(())
}

/// Unnormalized log-probability `gamma * sum_{i<j} sign(r_i - r_j)(f_i - f_j)`.
pub fn mrf_log_joint<T: Scalar>(scores: &[T], ratings: &[u32], gamma: T) -> T {
    let mut acc = T::zero();
    for i in 0..scores.len() {
        for j in i + 1..scores.len() {
            acc += sign::<T>(ratings[i], ratings[j]) * (scores[i] - scores[j]);
        }
    }
    gamma * acc
}

fn conditional_exponents<T: Scalar>(scores: &[T], ratings: &[u32], i: usize, gamma: T, num_levels: u32) -> Vec<T> {
    (0..num_levels)
        .map(|l| {
            let mut e = T::zero();
            for j in (0..scores.len()).filter(|&j| j != i) {
                e += sign::<T>(l, ratings[j]) * (scores[i] - scores[j]);
            }
            gamma * e
        })
        .collect()
}

/// `P(r_i = l | r_{-i})` for every level `l`.
pub fn wpll_conditionals<T: Scalar>(
    scores: &[T],
    ratings: &[u32],
    i: usize,
    gamma: T,
    num_levels: u32,
) -> Result<Vec<T>> {
    check_inputs(scores, ratings, num_levels)?;
    if i >= scores.len() {
        return Err(Error::Length {
            expected: scores.len(),
            got: i + 1,
        });
    }
    let e = conditional_exponents(scores, ratings, i, gamma, num_levels);
    let z = log_sum_exp(e.iter().copied());
    Ok(e.into_iter().map(|x| (x - z).exp()).collect())
}

/// Weighted pseudo-likelihood loss `-sum_i W_i log P(r_i | r_{-i})`.
pub fn wpll_loss<T: Scalar>(
    scores: &[T],
    ratings: &[u32],
    gamma: T,
    num_levels: u32,
    weights: &[T],
) -> Result<LossValueAndGrad<T>> {
    check_inputs(scores, ratings, num_levels)?;
    let n = scores.len();
    if weights.len() != n {
        return Err(Error::Length {
            expected: n,
            got: weights.len(),
        });
    }
    let mut out = LossValueAndGrad::zero(n);
    for i in 0..n {
        let w = weights[i];
        if w == T::zero() {
            continue;
        }
        let e = conditional_exponents(scores, ratings, i, gamma, num_levels);
        let z = log_sum_exp(e.iter().copied());
        let ri = ratings[i];
        out.value += w * (z - e[ri as usize]);
        let probs: Vec<T> = e.iter().map(|&x| (x - z).exp()).collect();
        for j in (0..n).filter(|&j| j != i) {
            // d e_l / d f_i = gamma sign(l - r_j); d e_l / d f_j = -gamma sign(l - r_j)
            let mut expected = T::zero();
            for (l, &p) in probs.iter().enumerate() {
                expected += p * sign::<T>(l as u32, ratings[j]);
            }
            let d = w * gamma * (expected - sign::<T>(ri, ratings[j]));
            out.grad[i] += d;
            out.grad[j] -= d;
        }
    }
    Ok(out)
}

/// Weight of the pair `(i, j)` in the pairwise bound. Only rating-free
/// schemes are meaningful here since ratings already enter the likelihood.
pub fn wub_pair_weight<T: Scalar>(scheme: PairWeightScheme, query_len: usize) -> Result<T> {
    match scheme {
        PairWeightScheme::Unit => Ok(T::one()),
        PairWeightScheme::InvQueryLength => Ok(T::one() / T::from_usize_lossy(query_len.max(1))),
        other => Err(Error::Config(format!(
            "pair weight '{}' depends on ratings and cannot be used with wub",
            other.name()
        ))),
    }
}

/// `log Z_ij` and its derivative in `delta = f_i - f_j`, where
/// `Z_ij = |L| + |L|(|L|-1)/2 * (e^{g delta} + e^{-g delta})`.
fn log_pair_partition<T: Scalar>(delta: T, gamma: T, num_levels: u32) -> (T, T) {
    let l = T::from_usize_lossy(num_levels as usize);
    let c = l * (l - T::one()) / T::of(2.0);
    let x = gamma * delta;
    let a = x.abs();
    let ea = (-a).exp();
    let e2a = (-(a + a)).exp();
    let inner = l * ea + c * (T::one() + e2a);
    let value = a + inner.ln();
    let slope = gamma * c * x.signum() * (T::one() - e2a) / inner;
    let slope = if x == T::zero() { T::zero() } else { slope };
    (value, slope)
}

/// Weighted pairwise upper bound `-sum_{i<j} W_ij log Q(r_i, r_j)` with
/// `Q = psi / Z_ij`.
pub fn wub_loss<T: Scalar>(
    scores: &[T],
    ratings: &[u32],
    gamma: T,
    num_levels: u32,
    scheme: PairWeightScheme,
) -> Result<LossValueAndGrad<T>> {
    check_inputs(scores, ratings, num_levels)?;
    let n = scores.len();
    let w = wub_pair_weight::<T>(scheme, n)?;
    let mut out = LossValueAndGrad::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            let delta = scores[i] - scores[j];
            let (log_z, dlog_z) = log_pair_partition(delta, gamma, num_levels);
            let s = sign::<T>(ratings[i], ratings[j]);
            out.value += w * (log_z - gamma * s * delta);
            let d = w * (dlog_z - gamma * s);
            out.grad[i] += d;
            out.grad[j] -= d;
        }
    }
    Ok(out)
}

/// Exact `-log P(r)` with the partition function summed over all `|L|^N`
/// rating configurations.
pub fn mrf_exact_logloss<T: Scalar>(scores: &[T], ratings: &[u32], gamma: T, num_levels: u32) -> Result<T> {
    check_inputs(scores, ratings, num_levels)?;
    let n = scores.len();
    let states = (num_levels as f64).powi(n as i32);
    if states > ENUMERATION_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            states,
            budget: ENUMERATION_BUDGET,
        });
    }
    let mut config = vec![0u32; n];
    let mut max = T::neg_infinity();
    let mut sum = T::zero();
    loop {
        let v = mrf_log_joint(scores, &config, gamma);
        if v > max {
            sum = sum * (max - v).exp() + T::one();
            max = v;
        } else {
            sum += (v - max).exp();
        }
        let mut k = 0;
        while k < n {
            config[k] += 1;
            if config[k] < num_levels {
                break;
            }
            config[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    let log_z = max + sum.ln();
    Ok(log_z - mrf_log_joint(scores, ratings, gamma))
}
