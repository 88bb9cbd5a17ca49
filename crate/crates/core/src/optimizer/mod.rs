//! Regularized risk minimization with L-BFGS and a finite-difference
//! gradient check.

mod lbfgs;
mod objective;

pub use lbfgs::{lbfgs_minimize, LbfgsOptions, LbfgsOutcome, Termination, WOLFE_C1, WOLFE_C2};
pub use objective::{risk, LossOptions, LossSpec, Objective, LOSS_NAMES};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::functionals::Model;
use crate::scalar::Scalar;

/// Standard deviation of the random parameter initialization.
pub const INIT_SD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub lambda: f64,
    pub max_iters: usize,
    pub memory: usize,
    pub grad_tol: f64,
    pub seed: u64,
    pub bit_exact: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            max_iters: 200,
            memory: 10,
            grad_tol: 1e-6,
            seed: 0,
            bit_exact: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        if self.memory == 0 {
            return Err(Error::Config("memory must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport<T> {
    pub final_risk: T,
    pub iterations: usize,
    pub grad_norm: T,
    /// Risk at the initial point and after every accepted iteration.
    pub risk_trace: Vec<T>,
    pub termination: Termination,
}

/// i.i.d. `N(0, INIT_SD^2)` parameters for `model`'s family and shape.
pub fn init_params<T: Scalar>(model: &Model<T>, seed: u64) -> Result<Model<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, INIT_SD).expect("valid sd");
    let theta: Vec<T> = (0..model.num_params())
        .map(|_| T::of(normal.sample(&mut rng)))
        .collect();
    model.with_params(&theta)
}

/// Minimizes the regularized risk starting from `initial`'s parameters.
/// `on_iter` receives the iteration number, the current model and its risk.
pub fn minimize<T: Scalar>(
    initial: &Model<T>,
    dataset: &Dataset<T>,
    loss: &LossSpec<T>,
    config: &TrainConfig,
    mut on_iter: impl FnMut(usize, &Model<T>, T),
) -> Result<(Model<T>, TrainReport<T>)> {
    config.validate()?;
    let objective = Objective::new(initial, dataset, *loss, T::of(config.lambda))?.bit_exact(config.bit_exact);
    let options = LbfgsOptions {
        max_iters: config.max_iters,
        memory: config.memory,
        grad_tol: config.grad_tol,
    };
    let outcome = lbfgs_minimize(
        |theta| objective.value_and_grad(theta),
        initial.params(),
        &options,
        |k, theta, value| {
            if let Ok(m) = objective.model_at(theta) {
                on_iter(k, &m, value);
            }
        },
    )?;
    let model = objective.model_at(&outcome.x)?;
    let grad_norm = outcome.grad.iter().fold(T::zero(), |m, &g| m.max(g.abs()));
    Ok((
        model,
        TrainReport {
            final_risk: outcome.value,
            iterations: outcome.iterations,
            grad_norm,
            risk_trace: outcome.trace,
            termination: outcome.termination,
        },
    ))
}

/// Runs [`minimize`] from `init_params(shape, seed)` for every seed and keeps
/// the run with the lowest final risk (earliest seed on ties). `config.seed`
/// is ignored. `on_iter` additionally receives the seed of the current start.
pub fn minimize_multistart<T: Scalar>(
    shape: &Model<T>,
    dataset: &Dataset<T>,
    loss: &LossSpec<T>,
    config: &TrainConfig,
    seeds: &[u64],
    mut on_iter: impl FnMut(u64, usize, &Model<T>, T),
) -> Result<(Model<T>, TrainReport<T>, u64)> {
    let mut best: Option<(Model<T>, TrainReport<T>, u64)> = None;
    for &seed in seeds {
        let init = init_params(shape, seed)?;
        let run_config = TrainConfig { seed, ..*config };
        let (model, report) = minimize(&init, dataset, loss, &run_config, |k, m, r| on_iter(seed, k, m, r))?;
        if best.as_ref().is_none_or(|(_, b, _)| report.final_risk < b.final_risk) {
            best = Some((model, report, seed));
        }
    }
    best.ok_or_else(|| Error::Config("at least one seed is required".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    /// Largest `|fd - analytic| / max(1, |analytic|)` over checked coordinates.
    pub max_rel_error: f64,
    /// Largest `|fd - analytic|`.
    pub max_abs_error: f64,
    pub checked: usize,
    /// Coordinates whose finite-difference stencil straddles a kink.
    pub skipped: usize,
}

/// Scale of the random parameter points used by [`grad_check`].
pub const GRAD_CHECK_SD: f64 = 0.5;

/// Compares the analytic risk gradient with central differences at
/// `num_points` random parameter vectors drawn around zero, over every
/// coordinate. Coordinates whose stencil crosses a non-differentiable point of
/// the loss are skipped and counted.
pub fn grad_check<T: Scalar>(
    model: &Model<T>,
    dataset: &Dataset<T>,
    loss: &LossSpec<T>,
    lambda: T,
    num_points: usize,
    h: T,
    seed: u64,
) -> Result<GradCheckReport> {
    if !(h > T::zero()) {
        return Err(Error::Config(format!("step must be positive, got {h}")));
    }
    let objective = Objective::new(model, dataset, *loss, lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, GRAD_CHECK_SD).expect("valid sd");
    let mut points: Vec<Vec<T>> = Vec::with_capacity(num_points);
    for _ in 0..num_points {
        points.push((0..objective.num_params()).map(|_| T::of(normal.sample(&mut rng))).collect());
    }
    check_points(&objective, &points, h)
}

/// [`grad_check`] at caller-supplied parameter vectors.
pub fn check_points<T: Scalar>(objective: &Objective<'_, T>, points: &[Vec<T>], h: T) -> Result<GradCheckReport> {
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        max_abs_error: 0.0,
        checked: 0,
        skipped: 0,
    };
    let kinks = objective.loss().has_kinks();
    for theta in points {
        let (_, grad) = objective.value_and_grad(theta)?;
        let base_sig = if kinks { objective.piece_signature(theta)? } else { Vec::new() };
        let mut probe = theta.clone();
        for k in 0..theta.len() {
            probe[k] = theta[k] + h;
            let up = objective.value(&probe)?;
            let up_sig = if kinks { objective.piece_signature(&probe)? } else { Vec::new() };
            probe[k] = theta[k] - h;
            let down = objective.value(&probe)?;
            let down_sig = if kinks { objective.piece_signature(&probe)? } else { Vec::new() };
            probe[k] = theta[k];
            if up_sig != base_sig || down_sig != base_sig {
                report.skipped += 1;
                continue;
            }
            let fd = ((up - down) / (h + h)).to_f64_lossy();
            let an = grad[k].to_f64_lossy();
            let abs = (fd - an).abs();
            report.max_abs_error = report.max_abs_error.max(abs);
            report.max_rel_error = report.max_rel_error.max(abs / an.abs().max(1.0));
            report.checked += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
