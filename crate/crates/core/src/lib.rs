//! Learning-to-rank building blocks: sparse ranking data, rank functionals,
//! rank metrics, query-level losses, probabilistic permutation and rating
//! models, and an L-BFGS trainer.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`; the `*32` aliases fix it
//! to `f32`.
//!
//! ```
//! use rankforge_core::{data::SyntheticSpec, optimizer, Model, LossSpec, TrainConfig};
//! use rankforge_core::losses::{PairLossKind, PairWeightScheme};
//!
//! let data = SyntheticSpec::new(10, 8, 4, 0.0, 1).generate::<f64>().unwrap().dataset;
//! let loss = LossSpec::Pairwise { kind: PairLossKind::Logistic, weights: PairWeightScheme::Unit };
//! let init = optimizer::init_params(&Model::linear(4), 0).unwrap();
//! let (model, report) = optimizer::minimize(&init, &data, &loss, &TrainConfig::default(), |_, _, _| {}).unwrap();
//! assert!(report.final_risk <= report.risk_trace[0]);
//! assert_eq!(model.num_params(), 5);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod functionals;
pub mod losses;
pub mod metrics;
pub mod optimizer;
pub mod probmodels;
pub mod scalar;

pub use error::{Error, Result};
pub use optimizer::{TrainConfig, TrainReport};
pub use scalar::Scalar;

pub type Dataset = data::Dataset<f64>;
pub type Query = data::Query<f64>;
pub type SparseVector = data::SparseVector<f64>;
pub type Model = functionals::Model<f64>;
pub type LossSpec = optimizer::LossSpec<f64>;
pub type LossValueAndGrad = losses::LossValueAndGrad<f64>;
pub type RankMetricReport = metrics::RankMetricReport<f64>;

pub type Dataset32 = data::Dataset<f32>;
pub type Query32 = data::Query<f32>;
pub type SparseVector32 = data::SparseVector<f32>;
pub type Model32 = functionals::Model<f32>;
pub type LossSpec32 = optimizer::LossSpec<f32>;
pub type LossValueAndGrad32 = losses::LossValueAndGrad<f32>;
pub type RankMetricReport32 = metrics::RankMetricReport<f32>;
