//! Rank functionals: scoring of (query, object) pairs.
//!
//! Four families are provided. [`LinearModel`] and [`QuadraticModel`] score a
//! combined feature vector; [`BilinearSigmoidModel`] and [`MetricModel`] map a
//! query vector and an object vector into a shared `d`-dimensional space.
//!
//! Every model exposes a flat parameter vector so the optimizer can treat all
//! families uniformly. Layouts:
//!
//! | family    | layout                                                |
//! |-----------|-------------------------------------------------------|
//! | linear    | `bias, w[0..m]`                                       |
//! | quadratic | `bias, w[0..m], c[0..k]` (one `c` per selected pair)  |
//! | bilinear  | `A` row-major `d x n1`, then `B` row-major `d x n2`   |
//! | metric    | same as bilinear                                      |

mod group;
mod io;
mod select;

pub use group::{extremal_gap, group_score, group_score_grad, GroupAggregation};
pub use io::{read_model, write_model, MODEL_MAGIC};
pub use select::{pearson, select_second_order};

use rayon::prelude::*;

use crate::data::{Dataset, Query, Representation, SparseVector};
use crate::error::{Error, Result};
use crate::scalar::{sigmoid, Scalar};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    /// `M v` for a sparse `v` indexed from 1. Ids beyond `cols` are ignored.
    pub fn mul_sparse(&self, v: &SparseVector<T>) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows];
        for (id, x) in v.iter() {
            let c = id as usize - 1;
            if c >= self.cols {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                *o += self.data[r * self.cols + c] * x;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Squash {
    #[default]
    Sigmoid,
    Tanh,
}

impl Squash {
    #[inline]
    fn apply<T: Scalar>(self, x: T) -> (T, T) {
        match self {
            Squash::Sigmoid => {
                let s = sigmoid(x);
                (s, s * (T::one() - s))
            }
            Squash::Tanh => {
                let t = x.tanh();
                (t, T::one() - t * t)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Squash::Sigmoid => "sigmoid",
            Squash::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Squash::Sigmoid, Squash::Tanh].into_iter().find(|s| s.name() == name)
    }
}

/// `bias + w'x`
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<T> {
    pub bias: T,
    pub weights: Vec<T>,
}

/// `bias + w'x + sum over selected (a, b) of c_ab * x_a * x_b`
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel<T> {
    pub bias: T,
    pub weights: Vec<T>,
    /// Selected 1-based feature pairs, `a <= b`, sorted and unique.
    pub pairs: Vec<(u32, u32)>,
    pub pair_weights: Vec<T>,
}

impl<T: Scalar> QuadraticModel<T> {
    pub fn new(dim: usize, pairs: Vec<(u32, u32)>) -> Result<Self> {
        for w in pairs.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Config("feature pairs must be sorted and unique".into()));
            }
        }
        if let Some(&(a, b)) = pairs
            .iter()
            .find(|&&(a, b)| a == 0 || a > b || b as usize > dim)
        {
            return Err(Error::Dimension(format!(
                "pair ({a}, {b}) outside 1 <= a <= b <= {dim}"
            )));
        }
        let k = pairs.len();
        Ok(Self {
            bias: T::zero(),
            weights: vec![T::zero(); dim],
            pairs,
            pair_weights: vec![T::zero(); k],
        })
    }
}

/// `sigma(A y)' B z` with an element-wise squash.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSigmoidModel<T> {
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub squash: Squash,
}

/// `-(1/tau) * ||A y - B z||^2`
#[derive(Debug, Clone, PartialEq)]
pub struct MetricModel<T> {
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub tau: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Linear,
    Quadratic,
    Bilinear,
    Metric,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Quadratic => "quad",
            Family::Bilinear => "bilinear",
            Family::Metric => "metric",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Family::Linear, Family::Quadratic, Family::Bilinear, Family::Metric]
            .into_iter()
            .find(|f| f.name() == name)
    }

    pub fn needs_combined(self) -> bool {
        matches!(self, Family::Linear | Family::Quadratic)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model<T> {
    Linear(LinearModel<T>),
    Quadratic(QuadraticModel<T>),
    Bilinear(BilinearSigmoidModel<T>),
    Metric(MetricModel<T>),
}

impl<T: Scalar> Model<T> {
    pub fn linear(dim: usize) -> Self {
        Model::Linear(LinearModel {
            bias: T::zero(),
            weights: vec![T::zero(); dim],
        })
    }

    pub fn quadratic(dim: usize, pairs: Vec<(u32, u32)>) -> Result<Self> {
        QuadraticModel::new(dim, pairs).map(Model::Quadratic)
    }

    pub fn bilinear(d: usize, query_dim: usize, object_dim: usize, squash: Squash) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("embedding dimension must be at least 1".into()));
        }
        Ok(Model::Bilinear(BilinearSigmoidModel {
            a: Matrix::zeros(d, query_dim),
            b: Matrix::zeros(d, object_dim),
            squash,
        }))
    }

    pub fn metric(d: usize, query_dim: usize, object_dim: usize, tau: T) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("embedding dimension must be at least 1".into()));
        }
        if !(tau > T::zero()) {
            return Err(Error::Config(format!("tau must be positive, got {tau}")));
        }
        Ok(Model::Metric(MetricModel {
            a: Matrix::zeros(d, query_dim),
            b: Matrix::zeros(d, object_dim),
            tau,
        }))
    }

    /// The data representation this model consumes.
    pub fn representation(&self) -> Representation {
        match self {
            Model::Linear(LinearModel { weights, .. }) | Model::Quadratic(QuadraticModel { weights, .. }) => {
                Representation::Combined { dim: weights.len() }
            }
            Model::Bilinear(BilinearSigmoidModel { a, b, .. }) | Model::Metric(MetricModel { a, b, .. }) => {
                Representation::Separate {
                    query_dim: a.cols,
                    object_dim: b.cols,
                }
            }
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Model::Linear(_) => Family::Linear,
            Model::Quadratic(_) => Family::Quadratic,
            Model::Bilinear(_) => Family::Bilinear,
            Model::Metric(_) => Family::Metric,
        }
    }

    pub fn num_params(&self) -> usize {
        match self {
            Model::Linear(m) => 1 + m.weights.len(),
            Model::Quadratic(m) => 1 + m.weights.len() + m.pair_weights.len(),
            Model::Bilinear(m) => m.a.data.len() + m.b.data.len(),
            Model::Metric(m) => m.a.data.len() + m.b.data.len(),
        }
    }

    pub fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.num_params());
        match self {
            Model::Linear(m) => {
                out.push(m.bias);
                out.extend_from_slice(&m.weights);
            }
            Model::Quadratic(m) => {
                out.push(m.bias);
                out.extend_from_slice(&m.weights);
                out.extend_from_slice(&m.pair_weights);
            }
            Model::Bilinear(BilinearSigmoidModel { a, b, .. })
            | Model::Metric(MetricModel { a, b, .. }) => {
                out.extend_from_slice(&a.data);
                out.extend_from_slice(&b.data);
            }
        }
        out
    }

    pub fn set_params(&mut self, theta: &[T]) -> Result<()> {
        if theta.len() != self.num_params() {
            return Err(Error::Length {
                expected: self.num_params(),
                got: theta.len(),
            });
        }
        match self {
            Model::Linear(m) => {
                m.bias = theta[0];
                m.weights.copy_from_slice(&theta[1..]);
            }
            Model::Quadratic(m) => {
                let dim = m.weights.len();
                m.bias = theta[0];
                m.weights.copy_from_slice(&theta[1..1 + dim]);
                m.pair_weights.copy_from_slice(&theta[1 + dim..]);
            }
            Model::Bilinear(BilinearSigmoidModel { a, b, .. })
            | Model::Metric(MetricModel { a, b, .. }) => {
                let na = a.data.len();
                a.data.copy_from_slice(&theta[..na]);
                b.data.copy_from_slice(&theta[na..]);
            }
        }
        Ok(())
    }

    pub fn with_params(&self, theta: &[T]) -> Result<Self> {
        let mut m = self.clone();
        m.set_params(theta)?;
        Ok(m)
    }

    /// `true` for parameters that carry the Gaussian penalty (all but the bias).
    pub fn penalty_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.num_params()];
        if matches!(self, Model::Linear(_) | Model::Quadratic(_)) {
            mask[0] = false;
        }
        mask
    }

    /// Checks that the model's input dimensions match a dataset representation.
    pub fn check_compatible(&self, repr: &Representation) -> Result<()> {
        match (self, repr) {
            (Model::Linear(LinearModel { weights, .. }), Representation::Combined { dim })
            | (Model::Quadratic(QuadraticModel { weights, .. }), Representation::Combined { dim }) => {
                if weights.len() != *dim {
                    return Err(Error::Dimension(format!(
                        "model expects {} features, data has {dim}",
                        weights.len()
                    )));
                }
                Ok(())
            }
            (
                Model::Bilinear(BilinearSigmoidModel { a, b, .. }) | Model::Metric(MetricModel { a, b, .. }),
                Representation::Separate {
                    query_dim,
                    object_dim,
                },
            ) => {
                if a.cols != *query_dim || b.cols != *object_dim {
                    return Err(Error::Dimension(format!(
                        "model expects ({}, {}) features, data has ({query_dim}, {object_dim})",
                        a.cols, b.cols
                    )));
                }
                Ok(())
            }
            (Model::Linear(_) | Model::Quadratic(_), _) => {
                Err(Error::UnsupportedRepresentation { expected: "combined" })
            }
            _ => Err(Error::UnsupportedRepresentation { expected: "separate" }),
        }
    }

    /// Scores a combined feature vector.
    pub fn score_combined(&self, x: &SparseVector<T>) -> Result<T> {
        match self {
            Model::Linear(m) => {
                check_ids(x, m.weights.len())?;
                Ok(m.bias + x.dot(&m.weights))
            }
            Model::Quadratic(m) => {
                check_ids(x, m.weights.len())?;
                let dense = x.to_dense(m.weights.len());
                Ok(quad_score(m, &dense))
            }
            _ => Err(Error::UnsupportedRepresentation { expected: "separate" }),
        }
    }

    /// Scores a (query vector, object vector) pair.
    pub fn score_separate(&self, y: &SparseVector<T>, z: &SparseVector<T>) -> Result<T> {
        let (a, b) = match self {
            Model::Bilinear(m) => (&m.a, &m.b),
            Model::Metric(m) => (&m.a, &m.b),
            _ => return Err(Error::UnsupportedRepresentation { expected: "combined" }),
        };
        check_ids(y, a.cols)?;
        check_ids(z, b.cols)?;
        let ay = a.mul_sparse(y);
        let bz = b.mul_sparse(z);
        Ok(self.embedded_score(&ay, &bz))
    }

    fn embedded_score(&self, ay: &[T], bz: &[T]) -> T {
        match self {
            Model::Bilinear(m) => ay
                .iter()
                .zip(bz)
                .map(|(&h, &g)| m.squash.apply(h).0 * g)
                .sum(),
            Model::Metric(m) => {
                let sq: T = ay.iter().zip(bz).map(|(&p, &q)| (p - q) * (p - q)).sum();
                -sq / m.tau
            }
            _ => unreachable!("embedded_score on combined model"),
        }
    }

    /// Scores every object of a query, in instance order.
    pub fn score_query(&self, query: &Query<T>) -> Result<Vec<T>> {
        match self {
            Model::Linear(_) | Model::Quadratic(_) => query
                .instances
                .iter()
                .map(|i| self.score_combined(&i.features))
                .collect(),
            Model::Bilinear(BilinearSigmoidModel { a, b, .. })
            | Model::Metric(MetricModel { a, b, .. }) => {
                let y = query
                    .query_features
                    .as_ref()
                    .ok_or(Error::UnsupportedRepresentation { expected: "separate" })?;
                check_ids(y, a.cols)?;
                let ay = a.mul_sparse(y);
                query
                    .instances
                    .iter()
                    .map(|i| {
                        check_ids(&i.features, b.cols)?;
                        Ok(self.embedded_score(&ay, &b.mul_sparse(&i.features)))
                    })
                    .collect()
            }
        }
    }

    /// Scores every query of a dataset, in dataset order.
    pub fn score_dataset(&self, dataset: &Dataset<T>) -> Result<Vec<Vec<T>>> {
        dataset.queries.par_iter().map(|q| self.score_query(q)).collect()
    }

    /// Adds `sum_i dscores[i] * d score_i / d theta` into `grad`.
    pub fn backprop_query(&self, query: &Query<T>, dscores: &[T], grad: &mut [T]) -> Result<()> {
        if dscores.len() != query.len() {
            return Err(Error::Length {
                expected: query.len(),
                got: dscores.len(),
            });
        }
        if grad.len() != self.num_params() {
            return Err(Error::Length {
                expected: self.num_params(),
                got: grad.len(),
            });
        }
        match self {
            Model::Linear(m) => {
                let dim = m.weights.len();
                for (inst, &c) in query.instances.iter().zip(dscores) {
                    if c == T::zero() {
                        continue;
                    }
                    grad[0] += c;
                    for (id, x) in inst.features.iter() {
                        if (id as usize) <= dim {
                            grad[id as usize] += c * x;
                        }
                    }
                }
            }
            Model::Quadratic(m) => {
                let dim = m.weights.len();
                for (inst, &c) in query.instances.iter().zip(dscores) {
                    if c == T::zero() {
                        continue;
                    }
                    grad[0] += c;
                    let dense = inst.features.to_dense(dim);
                    for (g, &x) in grad[1..=dim].iter_mut().zip(&dense) {
                        *g += c * x;
                    }
                    for (g, &(a, b)) in grad[1 + dim..].iter_mut().zip(&m.pairs) {
                        *g += c * dense[a as usize - 1] * dense[b as usize - 1];
                    }
                }
            }
            Model::Bilinear(m) => {
                let y = query
                    .query_features
                    .as_ref()
                    .ok_or(Error::UnsupportedRepresentation { expected: "separate" })?;
                let (d, n1) = (m.a.rows, m.a.cols);
                let ay = m.a.mul_sparse(y);
                let squashed: Vec<(T, T)> = ay.iter().map(|&h| m.squash.apply(h)).collect();
                let (ga, gb) = grad.split_at_mut(d * n1);
                for (inst, &c) in query.instances.iter().zip(dscores) {
                    if c == T::zero() {
                        continue;
                    }
                    let bz = m.b.mul_sparse(&inst.features);
                    for k in 0..d {
                        let (s, ds) = squashed[k];
                        let coef_a = c * ds * bz[k];
                        for (id, yl) in y.iter() {
                            if (id as usize) <= n1 {
                                ga[k * n1 + id as usize - 1] += coef_a * yl;
                            }
                        }
                        let coef_b = c * s;
                        for (id, zl) in inst.features.iter() {
                            if (id as usize) <= m.b.cols {
                                gb[k * m.b.cols + id as usize - 1] += coef_b * zl;
                            }
                        }
                    }
                }
            }
            Model::Metric(m) => {
                let y = query
                    .query_features
                    .as_ref()
                    .ok_or(Error::UnsupportedRepresentation { expected: "separate" })?;
                let (d, n1) = (m.a.rows, m.a.cols);
                let ay = m.a.mul_sparse(y);
                let (ga, gb) = grad.split_at_mut(d * n1);
                let two_over_tau = T::of(2.0) / m.tau;
                for (inst, &c) in query.instances.iter().zip(dscores) {
                    if c == T::zero() {
                        continue;
                    }
                    let bz = m.b.mul_sparse(&inst.features);
                    for k in 0..d {
                        let coef = c * two_over_tau * (ay[k] - bz[k]);
                        for (id, yl) in y.iter() {
                            if (id as usize) <= n1 {
                                ga[k * n1 + id as usize - 1] -= coef * yl;
                            }
                        }
                        for (id, zl) in inst.features.iter() {
                            if (id as usize) <= m.b.cols {
                                gb[k * m.b.cols + id as usize - 1] += coef * zl;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn quad_score<T: Scalar>(m: &QuadraticModel<T>, dense: &[T]) -> T {
    let mut s = m.bias;
    for (&w, &x) in m.weights.iter().zip(dense) {
        s += w * x;
    }
    for (&c, &(a, b)) in m.pair_weights.iter().zip(&m.pairs) {
        s += c * dense[a as usize - 1] * dense[b as usize - 1];
    }
    s
}

fn check_ids<T: Scalar>(v: &SparseVector<T>, dim: usize) -> Result<()> {
    if v.max_id() as usize > dim {
        return Err(Error::Dimension(format!(
            "feature {} exceeds model dimension {dim}",
            v.max_id()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(pairs: &[(u32, f64)]) -> SparseVector<f64> {
        SparseVector::from_pairs(pairs.to_vec()).unwrap()
    }

    #[test]
    fn linear_dot_product() {
        let m = Model::Linear(LinearModel {
            bias: 0.5,
            weights: vec![1.0, -1.0],
        });
        assert_eq!(m.score_combined(&sv(&[(1, 2.0), (2, 1.0)])).unwrap(), 1.5);
        assert!(matches!(
            m.score_combined(&sv(&[(3, 1.0)])),
            Err(Error::Dimension(_))
        ));
        assert!(m.score_separate(&sv(&[]), &sv(&[])).is_err());
    }

    #[test]
    fn quadratic_with_zero_pairs_is_linear() {
        let mut q = QuadraticModel::new(3, vec![(1, 1), (1, 3), (2, 3)]).unwrap();
        q.bias = 0.25;
        q.weights = vec![1.0, 2.0, -0.5];
        let lin = Model::Linear(LinearModel {
            bias: 0.25,
            weights: q.weights.clone(),
        });
        let x = sv(&[(1, 0.3), (2, -1.2), (3, 4.0)]);
        let quad = Model::Quadratic(q);
        assert_eq!(quad.score_combined(&x).unwrap(), lin.score_combined(&x).unwrap());
    }

    #[test]
    fn quadratic_cross_and_square_terms() {
        let mut q = QuadraticModel::new(2, vec![(1, 1), (1, 2)]).unwrap();
        q.pair_weights = vec![2.0, 3.0];
        let x = sv(&[(1, 2.0), (2, 5.0)]);
        // 2 * 2^2 + 3 * 2 * 5
        assert_eq!(Model::Quadratic(q).score_combined(&x).unwrap(), 38.0);
    }

    #[test]
    fn quadratic_rejects_bad_pairs() {
        assert!(QuadraticModel::<f64>::new(3, vec![(2, 1)]).is_err());
        assert!(QuadraticModel::<f64>::new(3, vec![(1, 4)]).is_err());
        assert!(QuadraticModel::<f64>::new(3, vec![(1, 2), (1, 2)]).is_err());
    }

    #[test]
    fn metric_coincidence_is_maximal() {
        let mut m = Model::<f64>::metric(2, 2, 2, 1.0).unwrap();
        // A = B = I
        m.set_params(&[1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let y = sv(&[(1, 0.3), (2, -0.7)]);
        assert_eq!(m.score_separate(&y, &y).unwrap(), 0.0);
        assert!(m.score_separate(&y, &sv(&[(1, 1.0)])).unwrap() < 0.0);
        assert!(Model::<f64>::metric(2, 2, 2, 0.0).is_err());
    }

    #[test]
    fn bilinear_with_zero_a_is_half_sum_of_bz() {
        let mut m = Model::<f64>::bilinear(3, 2, 2, Squash::Sigmoid).unwrap();
        let mut theta = vec![0.0; 6];
        theta.extend([1.0, 2.0, -1.0, 0.5, 3.0, 0.0]);
        m.set_params(&theta).unwrap();
        let z = sv(&[(1, 1.0), (2, 2.0)]);
        // B z = (5, 0, 3), sum = 8
        let s = m.score_separate(&sv(&[(1, 9.0)]), &z).unwrap();
        assert!((s - 4.0).abs() < 1e-15);
    }

    #[test]
    fn penalty_mask_excludes_bias_only() {
        let m = Model::<f64>::linear(3);
        assert_eq!(m.penalty_mask(), vec![false, true, true, true]);
        let m = Model::<f64>::metric(1, 1, 1, 1.0).unwrap();
        assert_eq!(m.penalty_mask(), vec![true, true]);
    }

    #[test]
    fn compatibility() {
        let m = Model::<f64>::linear(3);
        assert!(m.check_compatible(&Representation::Combined { dim: 3 }).is_ok());
        assert!(matches!(
            m.check_compatible(&Representation::Combined { dim: 4 }),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            m.check_compatible(&Representation::Separate { query_dim: 1, object_dim: 1 }),
            Err(Error::UnsupportedRepresentation { .. })
        ));
    }

    proptest! {
        #[test]
        fn score_is_linear_in_parameters(
            t1 in proptest::collection::vec(-3.0f64..3.0, 6),
            t2 in proptest::collection::vec(-3.0f64..3.0, 6),
            alpha in -2.0f64..2.0,
            beta in -2.0f64..2.0,
            x in proptest::collection::vec(-2.0f64..2.0, 3),
        ) {
            let base = Model::<f64>::quadratic(3, vec![(1, 2), (3, 3)]).unwrap();
            let mix: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| alpha * a + beta * b).collect();
            let xv = SparseVector::from_dense(&x);
            let s = |t: &[f64]| base.with_params(t).unwrap().score_combined(&xv).unwrap();
            prop_assert!((s(&mix) - (alpha * s(&t1) + beta * s(&t2))).abs() < 1e-9);
        }

        #[test]
        fn adding_zero_pair_changes_nothing(
            theta in proptest::collection::vec(-3.0f64..3.0, 5),
            x in proptest::collection::vec(-2.0f64..2.0, 3),
        ) {
            let small = Model::<f64>::quadratic(3, vec![(1, 3)]).unwrap().with_params(&theta).unwrap();
            let mut t2 = theta.clone();
            t2.push(0.0);
            let big = Model::<f64>::quadratic(3, vec![(1, 3), (2, 2)]).unwrap().with_params(&t2).unwrap();
            let xv = SparseVector::from_dense(&x);
            prop_assert_eq!(small.score_combined(&xv).unwrap(), big.score_combined(&xv).unwrap());
        }
    }
}
