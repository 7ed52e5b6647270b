//! Fully connected network: ReLU hidden layers, one sigmoid output unit,
//! binary cross-entropy with an L2 penalty on the weights, trained by Adam
//! on shuffled mini-batches.
//!
//! All parameters live in one flat vector, layer by layer, each layer's
//! weight matrix (row-major, `out x in`) followed by its biases. Adam and
//! the finite-difference checks both work on that vector directly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{check_training_set, log_loss_from_logit, sigmoid, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: vec![3, 2],
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 32,
            epochs: 200,
            l2: 1e-4,
        }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(format!("mlp: {m}")));
        if self.hidden.iter().any(|&h| h == 0) {
            return bad("hidden layer sizes must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("beta1 and beta2 must lie in [0,1)");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad("l2 must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    /// Layer widths including input and the single output unit.
    dims: Vec<usize>,
    params: Vec<f64>,
}

impl Mlp {
    /// Glorot-uniform initialization. The output layer uses the narrower
    /// bound suited to a sigmoid unit.
    pub fn init(input_dim: usize, hidden: &[usize], rng: &mut impl Rng) -> Self {
        let mut dims = Vec::with_capacity(hidden.len() + 2);
        dims.push(input_dim);
        dims.extend_from_slice(hidden);
        dims.push(1);
        let mut params = Vec::new();
        let layers = dims.len() - 1;
        for l in 0..layers {
            let (fan_in, fan_out) = (dims[l], dims[l + 1]);
            let factor = if l + 1 == layers { 2.0 } else { 6.0 };
            let bound = (factor / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push(rng.random_range(-bound..bound));
            }
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Mlp { dims, params }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn layer_offsets(&self) -> Vec<(usize, usize)> {
        // (weight offset, bias offset) per layer
        let mut out = Vec::with_capacity(self.dims.len() - 1);
        let mut off = 0;
        for l in 0..self.dims.len() - 1 {
            let w = off;
            let b = w + self.dims[l] * self.dims[l + 1];
            out.push((w, b));
            off = b + self.dims[l + 1];
        }
        out
    }

    /// Mask of weight (as opposed to bias) entries, for the L2 term.
    fn weight_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.params.len()];
        for (w, b) in self.layer_offsets() {
            mask[w..b].iter_mut().for_each(|m| *m = true);
        }
        mask
    }

    fn forward(&self, x: &[f64], offsets: &[(usize, usize)], acts: &mut Vec<Vec<f64>>) -> f64 {
        acts.resize(self.dims.len(), Vec::new());
        acts[0].clear();
        acts[0].extend_from_slice(x);
        let layers = self.dims.len() - 1;
        for l in 0..layers {
            let (fan_in, fan_out) = (self.dims[l], self.dims[l + 1]);
            let (w, b) = offsets[l];
            let (prev, rest) = acts.split_at_mut(l + 1);
            let input = &prev[l];
            let out = &mut rest[0];
            out.clear();
            for j in 0..fan_out {
                let row = &self.params[w + j * fan_in..w + (j + 1) * fan_in];
                let z = self.params[b + j] + row.iter().zip(input).map(|(a, c)| a * c).sum::<f64>();
                // hidden activations are post-ReLU; the output keeps the logit
                out.push(if l + 1 < layers { z.max(0.0) } else { z });
            }
        }
        acts[layers][0]
    }

    /// Output logit for one input row.
    pub fn logit(&self, x: &[f64]) -> f64 {
        let offsets = self.layer_offsets();
        let mut acts = Vec::new();
        self.forward(x, &offsets, &mut acts)
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    /// Mean batch cross-entropy plus `l2 / (2 n) * sum(w^2)`, and its
    /// gradient with respect to the flat parameter vector.
    pub fn loss_and_gradient(&self, x: &Matrix, y: &[bool], rows: &[usize], l2: f64, grad: &mut Vec<f64>) -> f64 {
        grad.clear();
        grad.resize(self.params.len(), 0.0);
        let offsets = self.layer_offsets();
        let layers = self.dims.len() - 1;
        let n = rows.len() as f64;
        let mut acts: Vec<Vec<f64>> = Vec::new();
        let mut delta: Vec<f64> = Vec::new();
        let mut next_delta: Vec<f64> = Vec::new();
        let mut loss = 0.0;

        for &i in rows {
            let target = if y[i] { 1.0 } else { 0.0 };
            let z = self.forward(x.row(i), &offsets, &mut acts);
            loss += log_loss_from_logit(z, target);
            delta.clear();
            delta.push((sigmoid(z) - target) / n);
            for l in (0..layers).rev() {
                let (fan_in, fan_out) = (self.dims[l], self.dims[l + 1]);
                let (w, b) = offsets[l];
                let input = &acts[l];
                for j in 0..fan_out {
                    let d = delta[j];
                    if d == 0.0 {
                        continue;
                    }
                    grad[b + j] += d;
                    let g = &mut grad[w + j * fan_in..w + (j + 1) * fan_in];
                    for (gk, a) in g.iter_mut().zip(input) {
                        *gk += d * a;
                    }
                }
                if l == 0 {
                    break;
                }
                next_delta.clear();
                next_delta.resize(fan_in, 0.0);
                for j in 0..fan_out {
                    let d = delta[j];
                    if d == 0.0 {
                        continue;
                    }
                    let row = &self.params[w + j * fan_in..w + (j + 1) * fan_in];
                    for (nd, wk) in next_delta.iter_mut().zip(row) {
                        *nd += d * wk;
                    }
                }
                // ReLU derivative from the stored activation
                for (nd, a) in next_delta.iter_mut().zip(&acts[l]) {
                    if *a <= 0.0 {
                        *nd = 0.0;
                    }
                }
                std::mem::swap(&mut delta, &mut next_delta);
            }
        }
        loss /= n;

        if l2 > 0.0 {
            let mut penalty = 0.0;
            for (w, b) in offsets {
                for k in w..b {
                    let p = self.params[k];
                    penalty += p * p;
                    grad[k] += l2 * p / n;
                }
            }
            loss += l2 * penalty / (2.0 * n);
        }
        loss
    }

    /// Loss only, same definition as [`Mlp::loss_and_gradient`].
    pub fn loss(&self, x: &Matrix, y: &[bool], rows: &[usize], l2: f64) -> f64 {
        let offsets = self.layer_offsets();
        let mut acts = Vec::new();
        let n = rows.len() as f64;
        let mut loss: f64 = rows
            .iter()
            .map(|&i| log_loss_from_logit(self.forward(x.row(i), &offsets, &mut acts), if y[i] { 1.0 } else { 0.0 }))
            .sum::<f64>()
            / n;
        if l2 > 0.0 {
            let mask = self.weight_mask();
            let penalty: f64 = self.params.iter().zip(&mask).filter(|(_, &m)| m).map(|(p, _)| p * p).sum();
            loss += l2 * penalty / (2.0 * n);
        }
        loss
    }

    pub fn fit(x: &Matrix, y: &[bool], params: &MlpParams, seed: u64) -> Result<Mlp> {
        params.validate()?;
        check_training_set(x, y)?;
        if x.rows() < 2 * params.batch_size {
            return Err(Error::degenerate(format!(
                "mlp needs at least {} samples for batch size {}, got {}",
                2 * params.batch_size,
                params.batch_size,
                x.rows()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = Mlp::init(x.cols(), &params.hidden, &mut rng);
        let p = net.params.len();
        let (mut m, mut v) = (vec![0.0; p], vec![0.0; p]);
        let mut grad = Vec::with_capacity(p);
        let mut order: Vec<usize> = (0..x.rows()).collect();
        let mut step = 0i32;

        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(params.batch_size) {
                net.loss_and_gradient(x, y, batch, params.l2, &mut grad);
                step += 1;
                let bc1 = 1.0 - params.beta1.powi(step);
                let bc2 = 1.0 - params.beta2.powi(step);
                let lr = params.learning_rate * bc2.sqrt() / bc1;
                for k in 0..p {
                    let g = grad[k];
                    m[k] = params.beta1 * m[k] + (1.0 - params.beta1) * g;
                    v[k] = params.beta2 * v[k] + (1.0 - params.beta2) * g * g;
                    net.params[k] -= lr * m[k] / (v[k].sqrt() + params.epsilon);
                }
            }
        }
        if net.params.iter().any(|w| !w.is_finite()) {
            return Err(Error::degenerate("mlp training diverged to non-finite weights"));
        }
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize, seed: u64) -> (Matrix, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let pos = i % 2 == 0;
            let mag: f64 = rng.random_range(0.5..3.0);
            rows.push(vec![if pos { mag } else { -mag }]);
            y.push(pos);
        }
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn parameter_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = Mlp::init(33, &[3, 2], &mut rng);
        assert_eq!(net.dims(), &[33, 3, 2, 1]);
        assert_eq!(net.params().len(), 33 * 3 + 3 + 3 * 2 + 2 + 2 + 1);
        assert_eq!(net.weight_mask().iter().filter(|&&m| m).count(), 99 + 6 + 2);
    }

    #[test]
    fn separable_toy_is_learned() {
        let (x, y) = toy(200, 1);
        let params = MlpParams {
            hidden: vec![3, 2],
            ..MlpParams::default()
        };
        let net = Mlp::fit(&x, &y, &params, 5).unwrap();
        let correct = (0..200).filter(|&i| (net.predict_proba(x.row(i)) > 0.5) == y[i]).count();
        assert!(correct as f64 / 200.0 >= 0.99, "{correct}");
    }

    #[test]
    fn deterministic() {
        let (x, y) = toy(100, 2);
        let p = MlpParams {
            epochs: 20,
            ..MlpParams::default()
        };
        let a = Mlp::fit(&x, &y, &p, 9).unwrap();
        let b = Mlp::fit(&x, &y, &p, 9).unwrap();
        assert_eq!(a, b);
        let c = Mlp::fit(&x, &y, &p, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn loss_matches_loss_and_gradient() {
        let (x, y) = toy(40, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Mlp::init(1, &[3, 2], &mut rng);
        let rows: Vec<usize> = (0..40).collect();
        let mut g = Vec::new();
        let a = net.loss_and_gradient(&x, &y, &rows, 0.3, &mut g);
        assert!((a - net.loss(&x, &y, &rows, 0.3)).abs() < 1e-14);
    }

    #[test]
    fn precondition_errors() {
        let (x, y) = toy(40, 4);
        assert!(Mlp::fit(&x, &y, &MlpParams::default(), 0).is_err()); // 40 < 2 * 32
        let one_class = vec![true; 40];
        let small = MlpParams {
            batch_size: 4,
            ..MlpParams::default()
        };
        assert!(Mlp::fit(&x, &one_class, &small, 0).is_err());
        let bad = MlpParams {
            learning_rate: -1.0,
            ..MlpParams::default()
        };
        assert!(bad.validate().is_err());
    }
}
