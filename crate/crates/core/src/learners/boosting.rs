//! Gradient boosting on log-loss. Each stage fits a shallow regression tree
//! to the residuals `y - p`; leaves take the Newton step
//! `sum(r) / sum(p (1 - p))`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{check_training_set, log_loss_from_logit, sigmoid, Matrix};
use super::tree::{Tree, TreeParams};
use crate::error::{Error, Result};

const MIN_HESSIAN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostingParams {
    pub n_stages: usize,
    pub max_depth: usize,
    pub shrinkage: f64,
    pub min_samples_split: usize,
}

impl Default for BoostingParams {
    fn default() -> Self {
        BoostingParams {
            n_stages: 100,
            max_depth: 3,
            shrinkage: 0.1,
            min_samples_split: 2,
        }
    }
}

impl BoostingParams {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.max_depth) {
            return Err(Error::invalid("gradient_boosting: max_depth must be in 1..=3"));
        }
        if !(self.shrinkage > 0.0 && self.shrinkage <= 1.0) {
            return Err(Error::invalid("gradient_boosting: shrinkage must be in (0, 1]"));
        }
        if self.min_samples_split < 2 {
            return Err(Error::invalid("gradient_boosting: min_samples_split must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Booster {
    pub init: f64,
    pub shrinkage: f64,
    trees: Vec<Tree>,
    /// Mean training log-loss after 0, 1, ..., n stages.
    pub stage_loss: Vec<f64>,
}

impl Booster {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.init + self.shrinkage * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    pub fn fit(x: &Matrix, y: &[bool], params: &BoostingParams, seed: u64) -> Result<Booster> {
        params.validate()?;
        check_training_set(x, y)?;
        let n = x.rows();
        let t: Vec<f64> = y.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let pos = t.iter().sum::<f64>() / n as f64;
        let init = (pos / (1.0 - pos)).ln();
        let mut f = vec![init; n];
        let mean_loss = |f: &[f64]| f.iter().zip(&t).map(|(&z, &y)| log_loss_from_logit(z, y)).sum::<f64>() / n as f64;
        let mut stage_loss = vec![mean_loss(&f)];
        let tree_params = TreeParams {
            max_depth: Some(params.max_depth),
            min_samples_split: params.min_samples_split,
            max_features: None,
        };
        // all features are evaluated, so the rng only fixes visiting order
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut trees = Vec::with_capacity(params.n_stages);
        for _ in 0..params.n_stages {
            let p: Vec<f64> = f.iter().map(|&z| sigmoid(z)).collect();
            let r: Vec<f64> = t.iter().zip(&p).map(|(y, p)| y - p).collect();
            let leaf = |rows: &[usize]| {
                let num: f64 = rows.iter().map(|&i| r[i]).sum();
                let den: f64 = rows.iter().map(|&i| p[i] * (1.0 - p[i])).sum();
                num / den.max(MIN_HESSIAN)
            };
            let tree = Tree::fit(x, &r, (0..n).collect(), &tree_params, &mut rng, leaf);
            for (i, fi) in f.iter_mut().enumerate() {
                *fi += params.shrinkage * tree.predict(x.row(i));
            }
            stage_loss.push(mean_loss(&f));
            trees.push(tree);
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::degenerate("boosting scores became non-finite"));
        }
        Ok(Booster {
            init,
            shrinkage: params.shrinkage,
            trees,
            stage_loss,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Matrix, Vec<bool>) {
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 } * (1.0 + (i as f64 * 0.37).fract()), (i as f64).sin()])
            .collect();
        (Matrix::from_rows(&rows).unwrap(), (0..200).map(|i| i % 2 == 0).collect())
    }

    #[test]
    fn zero_stages_is_base_rate() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let b = Booster::fit(&x, &[true, false, false, false], &BoostingParams { n_stages: 0, ..Default::default() }, 0).unwrap();
        for v in [-5.0, 0.0, 7.0] {
            assert!((b.predict_proba(&[v]) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn separable_and_monotone() {
        let (x, y) = toy();
        let b = Booster::fit(&x, &y, &BoostingParams::default(), 0).unwrap();
        let ok = (0..200).filter(|&i| (b.predict_proba(x.row(i)) > 0.5) == y[i]).count();
        assert!(ok >= 198);
        assert_eq!(b.stage_loss.len(), 101);
        for w in b.stage_loss.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "{} > {}", w[1], w[0]);
        }
        assert!(b.trees().iter().all(|t| t.depth() <= 3));
    }

    #[test]
    fn noisy_stage_losses_nonincreasing() {
        let rows: Vec<Vec<f64>> = (0..150).map(|i| vec![(i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()]).collect();
        let y: Vec<bool> = (0..150).map(|i| (i * 31) % 5 < 2).collect();
        let b = Booster::fit(&Matrix::from_rows(&rows).unwrap(), &y, &BoostingParams::default(), 1).unwrap();
        for w in b.stage_loss.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(BoostingParams { max_depth: 4, ..Default::default() }.validate().is_err());
        assert!(BoostingParams { shrinkage: 0.0, ..Default::default() }.validate().is_err());
    }
}
