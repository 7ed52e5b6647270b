//! L2-regularized logistic regression, full-batch gradient descent with
//! Armijo backtracking. The bias is not penalized.
//!
//! Steps are scaled by a fixed diagonal bound on the Hessian. Without it a
//! large penalty makes the weight block far stiffer than the bias and plain
//! descent crawls.

use serde::{Deserialize, Serialize};

use super::matrix::{check_training_set, log_loss_from_logit, sigmoid, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogregParams {
    /// Penalty `lambda / (2 n) * |w|^2`.
    pub lambda: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for LogregParams {
    fn default() -> Self {
        LogregParams {
            lambda: 1.0,
            tolerance: 1e-6,
            max_iter: 5000,
        }
    }
}

impl LogregParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("logreg: lambda must be nonnegative"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("logreg: tolerance must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("logreg: max_iter must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logreg {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Loss after every accepted step, starting from the zero model.
    pub loss_trace: Vec<f64>,
    pub converged: bool,
}

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

impl Logreg {
    pub fn zero(dim: usize) -> Self {
        Logreg {
            weights: vec![0.0; dim],
            bias: 0.0,
            loss_trace: Vec::new(),
            converged: false,
        }
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    /// Objective at `(w, b)`; fills `grad` with `[dw..., db]` when given.
    fn objective(x: &Matrix, y: &[bool], lambda: f64, w: &[f64], b: f64, grad: Option<&mut Vec<f64>>) -> f64 {
        let n = x.rows() as f64;
        let d = x.cols();
        let mut loss = 0.0;
        let mut g = grad;
        if let Some(g) = g.as_deref_mut() {
            g.clear();
            g.resize(d + 1, 0.0);
        }
        for i in 0..x.rows() {
            let row = x.row(i);
            let z = b + w.iter().zip(row).map(|(a, c)| a * c).sum::<f64>();
            let t = if y[i] { 1.0 } else { 0.0 };
            loss += log_loss_from_logit(z, t);
            if let Some(g) = g.as_deref_mut() {
                let r = sigmoid(z) - t;
                for (gk, v) in g[..d].iter_mut().zip(row) {
                    *gk += r * v;
                }
                g[d] += r;
            }
        }
        let sq: f64 = w.iter().map(|v| v * v).sum();
        if let Some(g) = g {
            for (gk, wk) in g[..d].iter_mut().zip(w) {
                *gk = *gk / n + lambda * wk / n;
            }
            g[d] /= n;
        }
        loss / n + lambda * sq / (2.0 * n)
    }

    pub fn fit(x: &Matrix, y: &[bool], params: &LogregParams) -> Result<Logreg> {
        params.validate()?;
        check_training_set(x, y)?;
        let d = x.cols();
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let n = x.rows() as f64;
        // diag of X^T X / (4n) + lambda / n, bias last
        let mut precond = vec![0.0; d + 1];
        for i in 0..x.rows() {
            for (p, v) in precond.iter_mut().zip(x.row(i)) {
                *p += v * v;
            }
        }
        for p in &mut precond[..d] {
            *p = *p / (4.0 * n) + params.lambda / n;
        }
        precond[d] = 0.25;
        let inv: Vec<f64> = precond.iter().map(|&p| if p > 0.0 { 1.0 / p } else { 1.0 }).collect();
        let mut grad = Vec::with_capacity(d + 1);
        let mut loss = Self::objective(x, y, params.lambda, &w, b, Some(&mut grad));
        let mut trace = vec![loss];
        let mut step: f64 = 0.5;
        let mut converged = false;
        let (mut w_new, mut grad_new) = (vec![0.0; d], Vec::with_capacity(d + 1));

        for _ in 0..params.max_iter {
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            if gnorm2.sqrt() <= params.tolerance {
                converged = true;
                break;
            }
            let descent: f64 = grad.iter().zip(&inv).map(|(g, p)| g * g * p).sum();
            // let the step grow again after a run of easy iterations
            step *= 2.0;
            let accepted = loop {
                for k in 0..d {
                    w_new[k] = w[k] - step * inv[k] * grad[k];
                }
                let b_new = b - step * inv[d] * grad[d];
                let cand = Self::objective(x, y, params.lambda, &w_new, b_new, None);
                if cand <= loss - ARMIJO_C * step * descent {
                    break Some((b_new, cand));
                }
                step *= 0.5;
                if step < MIN_STEP {
                    break None;
                }
            };
            let Some((b_new, _)) = accepted else {
                // no descent possible at machine precision
                converged = true;
                break;
            };
            std::mem::swap(&mut w, &mut w_new);
            b = b_new;
            loss = Self::objective(x, y, params.lambda, &w, b, Some(&mut grad_new));
            std::mem::swap(&mut grad, &mut grad_new);
            trace.push(loss);
        }
        if !(w.iter().all(|v| v.is_finite()) && b.is_finite()) {
            return Err(Error::degenerate("logreg weights became non-finite"));
        }
        Ok(Logreg {
            weights: w,
            bias: b,
            loss_trace: trace,
            converged,
        })
    }
}
