//! Limited-memory BFGS with a strong Wolfe line search.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Line search constants: sufficient decrease and curvature.
pub const WOLFE_C1: f64 = 1e-4;
pub const WOLFE_C2: f64 = 0.9;
const MAX_LINE_SEARCH_EVALS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    LineSearchFailure,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::GradientTolerance => "grad_tol",
            Termination::MaxIterations => "max_iters",
            Termination::LineSearchFailure => "line_search",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub max_iters: usize,
    pub memory: usize,
    pub grad_tol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            memory: 10,
            grad_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsOutcome<T> {
    pub x: Vec<T>,
    pub value: T,
    pub grad: Vec<T>,
    pub iterations: usize,
    /// Objective at the start and after every accepted step.
    pub trace: Vec<T>,
    pub termination: Termination,
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn inf_norm<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

fn check_finite<T: Scalar>(value: T, grad: &[T], x: &[T]) -> Result<()> {
    if value.is_finite() && grad.iter().all(|g| g.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical {
            message: format!("non-finite objective or gradient (value {value})"),
            params: x.iter().map(|v| v.to_f64_lossy()).collect(),
        })
    }
}

struct Probe<T> {
    alpha: T,
    value: T,
    slope: T,
    x: Vec<T>,
    grad: Vec<T>,
}

/// Minimizer of the cubic through `(a, fa, ga)` and `(b, fb, gb)`, or `None`
/// when it does not exist.
fn cubic_minimizer<T: Scalar>(a: T, fa: T, ga: T, b: T, fb: T, gb: T) -> Option<T> {
    let d1 = ga + gb - T::of(3.0) * (fa - fb) / (a - b);
    let disc = d1 * d1 - ga * gb;
    if !(disc >= T::zero()) {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let alpha = b - (b - a) * (gb + d2 - d1) / (gb - ga + d2 + d2);
    alpha.is_finite().then_some(alpha)
}

struct LineSearch<'a, T, F> {
    f: &'a mut F,
    x: &'a [T],
    dir: &'a [T],
    value0: T,
    slope0: T,
}

impl<T: Scalar, F: FnMut(&[T]) -> Result<(T, Vec<T>)>> LineSearch<'_, T, F> {
    fn probe(&mut self, alpha: T) -> Result<Probe<T>> {
        let x: Vec<T> = self.x.iter().zip(self.dir).map(|(&xi, &d)| xi + alpha * d).collect();
        let (value, grad) = (self.f)(&x)?;
        check_finite(value, &grad, &x)?;
        let slope = dot(&grad, self.dir);
        Ok(Probe {
            alpha,
            value,
            slope,
            x,
            grad,
        })
    }

    fn armijo_fails(&self, p: &Probe<T>) -> bool {
        p.value > self.value0 + T::of(WOLFE_C1) * p.alpha * self.slope0
    }

    fn curvature_holds(&self, p: &Probe<T>) -> bool {
        p.slope.abs() <= -T::of(WOLFE_C2) * self.slope0
    }

    fn run(&mut self, alpha0: T) -> Result<Option<Probe<T>>> {
        let mut prev = Probe {
            alpha: T::zero(),
            value: self.value0,
            slope: self.slope0,
            x: self.x.to_vec(),
            grad: Vec::new(),
        };
        let mut alpha = alpha0;
        for i in 0..MAX_LINE_SEARCH_EVALS {
            let p = self.probe(alpha)?;
            if self.armijo_fails(&p) || (i > 0 && p.value >= prev.value) {
                return self.zoom(prev, p, MAX_LINE_SEARCH_EVALS - i);
            }
            if self.curvature_holds(&p) {
                return Ok(Some(p));
            }
            if p.slope >= T::zero() {
                return self.zoom(p, prev, MAX_LINE_SEARCH_EVALS - i);
            }
            alpha *= T::of(2.0);
            prev = p;
        }
        Ok(None)
    }

    fn zoom(&mut self, mut lo: Probe<T>, mut hi: Probe<T>, budget: usize) -> Result<Option<Probe<T>>> {
        for _ in 0..budget {
            let (a, b) = (lo.alpha, hi.alpha);
            let width = (b - a).abs();
            if width <= T::epsilon() * a.abs().max(T::one()) {
                break;
            }
            let left = a.min(b) + T::of(0.1) * width;
            let right = a.max(b) - T::of(0.1) * width;
            let alpha = match cubic_minimizer(a, lo.value, lo.slope, b, hi.value, hi.slope) {
                Some(c) if c >= left && c <= right => c,
                _ => (a + b) / T::of(2.0),
            };
            let p = self.probe(alpha)?;
            if self.armijo_fails(&p) || p.value >= lo.value {
                hi = p;
            } else {
                if self.curvature_holds(&p) {
                    return Ok(Some(p));
                }
                if p.slope * (hi.alpha - lo.alpha) >= T::zero() {
                    hi = std::mem::replace(&mut lo, p);
                } else {
                    lo = p;
                }
            }
        }
        // accept the best sufficient-decrease point found, if any
        if lo.alpha > T::zero() && !lo.grad.is_empty() && lo.value < self.value0 {
            return Ok(Some(lo));
        }
        Ok(None)
    }
}

/// Minimizes `f` from `x0`. `f` returns the objective and its gradient.
/// `on_iter` is called after every accepted step with the iteration number,
/// the new point and its objective value.
pub fn lbfgs_minimize<T, F>(
    mut f: F,
    x0: Vec<T>,
    options: &LbfgsOptions,
    mut on_iter: impl FnMut(usize, &[T], T),
) -> Result<LbfgsOutcome<T>>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<(T, Vec<T>)>,
{
    if options.memory == 0 {
        return Err(Error::Config("L-BFGS memory must be at least 1".into()));
    }
    let mut x = x0;
    let (mut value, mut grad) = f(&x)?;
    check_finite(value, &grad, &x)?;
    let mut trace = vec![value];
    let mut history: VecDeque<(Vec<T>, Vec<T>, T)> = VecDeque::with_capacity(options.memory);
    let tol = T::of(options.grad_tol);
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    while iterations < options.max_iters {
        if inf_norm(&grad) <= tol {
            termination = Termination::GradientTolerance;
            break;
        }
        let mut dir = two_loop(&grad, &history);
        let mut slope = dot(&grad, &dir);
        if !(slope < T::zero()) {
            history.clear();
            dir = grad.iter().map(|&g| -g).collect();
            slope = dot(&grad, &dir);
        }
        let alpha0 = if history.is_empty() {
            T::one().min(T::one() / dot(&grad, &grad).sqrt())
        } else {
            T::one()
        };
        let found = LineSearch {
            f: &mut f,
            x: &x,
            dir: &dir,
            value0: value,
            slope0: slope,
        }
        .run(alpha0)?;
        let Some(p) = found else {
            termination = Termination::LineSearchFailure;
            break;
        };
        let s: Vec<T> = p.x.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = p.grad.iter().zip(&grad).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > T::epsilon() * dot(&y, &y) {
            if history.len() == options.memory {
                history.pop_front();
            }
            history.push_back((s, y, T::one() / sy));
        }
        x = p.x;
        value = p.value;
        grad = p.grad;
        iterations += 1;
        trace.push(value);
        on_iter(iterations, &x, value);
    }
    if termination == Termination::MaxIterations && inf_norm(&grad) <= tol {
        termination = Termination::GradientTolerance;
    }
    Ok(LbfgsOutcome {
        x,
        value,
        grad,
        iterations,
        trace,
        termination,
    })
}

/// `-H g` with `H` the implicit inverse Hessian approximation.
fn two_loop<T: Scalar>(grad: &[T], history: &VecDeque<(Vec<T>, Vec<T>, T)>) -> Vec<T> {
    let mut q: Vec<T> = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = *rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, &yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = *rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, &si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|qi| *qi = -*qi);
    q
}
