use super::*;
use crate::data::{Dataset, Instance, Query, Representation, SparseVector, SyntheticSpec};
use crate::losses::{PairLossKind, PairWeightScheme};
use crate::metrics::evaluate;

fn logit(weights: PairWeightScheme) -> LossSpec<f64> {
    LossSpec::Pairwise {
        kind: PairLossKind::Logistic,
        weights,
    }
}

fn synthetic(seed: u64) -> Dataset<f64> {
    SyntheticSpec::new(20, 10, 5, 0.0, seed).generate().unwrap().dataset
}

fn non_bias_norm(model: &Model<f64>) -> f64 {
    model
        .params()
        .iter()
        .zip(model.penalty_mask())
        .filter(|(_, m)| *m)
        .map(|(t, _)| t * t)
        .sum::<f64>()
        .sqrt()
}

#[test]
fn risk_at_zero_is_mean_loss() {
    let data = synthetic(1);
    let model = Model::linear(5);
    let r0 = risk(&model, &data, &logit(PairWeightScheme::Unit), 0.0).unwrap();
    let r1 = risk(&model, &data, &logit(PairWeightScheme::Unit), 100.0).unwrap();
    assert_eq!(r0, r1);
}

#[test]
fn single_query_risk_is_loss_plus_penalty() {
    let q = Query {
        id: "a".into(),
        query_features: None,
        instances: vec![
            Instance {
                rating: 1,
                features: SparseVector::from_dense(&[1.0, 0.0]),
            },
            Instance {
                rating: 0,
                features: SparseVector::from_dense(&[0.0, 1.0]),
            },
        ],
    };
    let data = Dataset::new(vec![q], 2, Representation::Combined { dim: 2 }).unwrap();
    let model = Model::linear(2).with_params(&[5.0, 1.0, -1.0]).unwrap();
    let r = risk(&model, &data, &logit(PairWeightScheme::Unit), 0.5).unwrap();
    let loss = (1.0f64 + (-2.0f64).exp()).ln();
    assert!((r - (loss + 0.25 * 2.0)).abs() < 1e-15);
}

#[test]
fn init_is_seeded() {
    let m = Model::<f64>::linear(8);
    assert_eq!(init_params(&m, 3).unwrap(), init_params(&m, 3).unwrap());
    assert_ne!(init_params(&m, 3).unwrap(), init_params(&m, 4).unwrap());
    let p = init_params(&m, 3).unwrap().params();
    assert!(p.iter().all(|x| x.abs() < 0.1));
}

#[test]
fn training_is_deterministic_and_monotone() {
    let data = synthetic(2);
    let init = init_params(&Model::linear(5), 7).unwrap();
    let config = TrainConfig {
        bit_exact: true,
        max_iters: 50,
        ..Default::default()
    };
    let loss = logit(PairWeightScheme::GainDiffNorm);
    let (m1, r1) = minimize(&init, &data, &loss, &config, |_, _, _| {}).unwrap();
    let (m2, r2) = minimize(&init, &data, &loss, &config, |_, _, _| {}).unwrap();
    assert_eq!(m1, m2);
    assert_eq!(r1.risk_trace, r2.risk_trace);
    assert!(r1.risk_trace.windows(2).all(|w| w[1] <= w[0]));
    assert!(r1.final_risk <= r1.risk_trace[0]);
}

#[test]
fn parallel_and_sequential_agree_closely() {
    let data = synthetic(3);
    let init = init_params(&Model::linear(5), 1).unwrap();
    let loss = logit(PairWeightScheme::Unit);
    let a = Objective::new(&init, &data, loss, 0.1).unwrap();
    let b = a.clone().bit_exact(true);
    let (va, ga) = a.value_and_grad(&init.params()).unwrap();
    let (vb, gb) = b.value_and_grad(&init.params()).unwrap();
    assert!((va - vb).abs() < 1e-12);
    for (x, y) in ga.iter().zip(&gb) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn recovers_noiseless_order() {
    let data = SyntheticSpec::new(50, 20, 10, 0.0, 11).generate::<f64>().unwrap().dataset;
    let init = init_params(&Model::linear(10), 0).unwrap();
    let config = TrainConfig {
        lambda: 1e-4,
        ..Default::default()
    };
    let (model, _) = minimize(&init, &data, &logit(PairWeightScheme::RatingDiffNorm), &config, |_, _, _| {}).unwrap();
    let report = evaluate(&data, &model.score_dataset(&data).unwrap(), &[10]).unwrap();
    assert!(report.ndcg_at[&10] >= 0.99, "{}", report.ndcg_at[&10]);
}

#[test]
fn strong_regularization_shrinks_weights() {
    let data = synthetic(4);
    let init = init_params(&Model::linear(5), 0).unwrap();
    let config = TrainConfig {
        lambda: 1e3,
        ..Default::default()
    };
    let (model, _) = minimize(&init, &data, &logit(PairWeightScheme::GainDiffNorm), &config, |_, _, _| {}).unwrap();
    assert!(non_bias_norm(&model) < 1e-2, "{}", non_bias_norm(&model));
}

#[test]
fn norm_is_monotone_in_lambda_and_iterates_stay_bounded() {
    let data = synthetic(5);
    let init = init_params(&Model::linear(5), 0).unwrap();
    let loss = logit(PairWeightScheme::Unit);
    let mut last = f64::INFINITY;
    for lambda in [0.01, 0.1, 1.0, 10.0] {
        let config = TrainConfig {
            lambda,
            ..Default::default()
        };
        let r0 = risk(&init, &data, &loss, lambda).unwrap();
        let bound = init.params().iter().map(|t| t * t).sum::<f64>().sqrt() + 10.0 * (2.0 * r0 / lambda).sqrt();
        let mut max_seen = 0.0f64;
        let (model, _) = minimize(&init, &data, &loss, &config, |_, m, _| {
            max_seen = max_seen.max(m.params().iter().map(|t| t * t).sum::<f64>().sqrt());
        })
        .unwrap();
        assert!(max_seen <= bound, "lambda {lambda}: {max_seen} > {bound}");
        let norm = non_bias_norm(&model);
        assert!(norm <= last + 1e-6, "lambda {lambda}: {norm} > {last}");
        last = norm;
    }
}

#[test]
fn gradient_check_linear_logistic() {
    let data = synthetic(6);
    let report = grad_check(&Model::linear(5), &data, &logit(PairWeightScheme::Unit), 0.1, 5, 1e-5, 1).unwrap();
    assert!(report.max_rel_error < 1e-5, "{report:?}");
    assert_eq!(report.skipped, 0);
    assert_eq!(report.checked, 30);
}

#[test]
fn gradient_check_at_symmetric_point() {
    let inst = |r, v: f64| Instance {
        rating: r,
        features: SparseVector::from_dense(&[v]),
    };
    let q = Query {
        id: "s".into(),
        query_features: None,
        instances: vec![inst(1, 1.0), inst(0, -1.0), inst(1, -1.0), inst(0, 1.0)],
    };
    let data = Dataset::new(vec![q], 2, Representation::Combined { dim: 1 }).unwrap();
    let obj = Objective::new(&Model::linear(1), &data, logit(PairWeightScheme::Unit), 0.0).unwrap();
    let (_, g) = obj.value_and_grad(&[0.0, 0.0]).unwrap();
    assert!(g.iter().all(|x| x.abs() < 1e-12));
    let report = check_points(&obj, &[vec![0.0, 0.0]], 1e-5).unwrap();
    assert!(report.max_abs_error < 1e-7);
}

#[test]
fn hinge_kink_is_skipped() {
    let q = Query {
        id: "k".into(),
        query_features: None,
        instances: vec![
            Instance {
                rating: 1,
                features: SparseVector::from_dense(&[1.0]),
            },
            Instance {
                rating: 0,
                features: SparseVector::from_dense(&[0.0]),
            },
        ],
    };
    let data = Dataset::new(vec![q], 2, Representation::Combined { dim: 1 }).unwrap();
    let loss = LossSpec::Pairwise {
        kind: PairLossKind::Hinge,
        weights: PairWeightScheme::Unit,
    };
    let obj = Objective::new(&Model::linear(1), &data, loss, 0.0).unwrap();
    // margin w * 1 - w * 0 = 1 exactly at w = 1
    let report = check_points(&obj, &[vec![0.0, 1.0]], 1e-5).unwrap();
    assert_eq!(report.skipped, 1);
    assert_eq!(report.checked, 1);
}

#[test]
fn loss_names_round_trip() {
    let opts = LossOptions::<f64>::default();
    for name in LOSS_NAMES {
        assert_eq!(LossSpec::from_name(name, &opts).unwrap().name(), name);
    }
    assert!(LossSpec::<f64>::from_name("listnet", &opts).is_err());
    let bad = LossOptions {
        pair_weights: PairWeightScheme::GainDiff,
        ..opts
    };
    assert!(matches!(LossSpec::from_name("wub", &bad), Err(Error::Config(_))));
    assert!(LossSpec::from_name("pair-logit", &bad).is_ok());
}

#[test]
fn incompatible_model_rejected_before_compute() {
    let data = synthetic(7);
    let model = Model::<f64>::bilinear(2, 3, 3, crate::functionals::Squash::Sigmoid).unwrap();
    assert!(Objective::new(&model, &data, logit(PairWeightScheme::Unit), 0.1).is_err());
}

#[test]
fn multistart_keeps_lowest_risk() {
    let data = synthetic(8);
    let shape = Model::linear(5);
    let loss = logit(PairWeightScheme::Unit);
    let config = TrainConfig {
        max_iters: 3,
        ..Default::default()
    };
    let mut seen = Vec::new();
    let (model, report, seed) =
        minimize_multistart(&shape, &data, &loss, &config, &[4, 9, 2], |s, _, _, _| seen.push(s)).unwrap();
    let single: Vec<f64> = [4, 9, 2]
        .iter()
        .map(|&s| {
            let init = init_params(&shape, s).unwrap();
            minimize(&init, &data, &loss, &TrainConfig { seed: s, ..config }, |_, _, _| {}).unwrap().1.final_risk
        })
        .collect();
    let min = single.iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(report.final_risk, min);
    assert_eq!(single[[4, 9, 2].iter().position(|&s| s == seed).unwrap()], min);
    assert!((risk(&model, &data, &loss, config.lambda).unwrap() - min).abs() < 1e-12);
    assert!(seen.contains(&4) && seen.contains(&9) && seen.contains(&2));
    assert!(minimize_multistart(&shape, &data, &loss, &config, &[], |_, _, _, _| {}).is_err());
}
