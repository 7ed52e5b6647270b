use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{check_training_set, Matrix};
use super::tree::{Tree, TreeParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features per split; `None` means `ceil(sqrt(d))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            max_features: None,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::invalid("random_forest: n_trees must be positive"));
        }
        if self.min_samples_split < 2 {
            return Err(Error::invalid("random_forest: min_samples_split must be at least 2"));
        }
        if self.max_features == Some(0) {
            return Err(Error::invalid("random_forest: max_features must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Number of trees whose leaf votes positive.
    pub fn votes(&self, x: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.predict(x) > 0.5).count()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.votes(x) as f64 / self.trees.len() as f64
    }

    pub fn fit(x: &Matrix, y: &[bool], params: &ForestParams, seed: u64) -> Result<Forest> {
        params.validate()?;
        check_training_set(x, y)?;
        let n = x.rows();
        let target: Vec<f64> = y.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            min_samples_split: params.min_samples_split,
            max_features: Some(params.max_features.unwrap_or_else(|| (x.cols() as f64).sqrt().ceil() as usize).min(x.cols())),
        };
        let leaf = |rows: &[usize]| rows.iter().map(|&i| target[i]).sum::<f64>() / rows.len() as f64;
        let trees = (0..params.n_trees)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let rows: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                Tree::fit(x, &target, rows, &tree_params, &mut rng, leaf)
            })
            .collect();
        Ok(Forest { trees })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize, offset: usize) -> (Matrix, Vec<bool>) {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let k = (i + offset) as f64;
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                vec![s * (1.0 + (k * 0.731).fract()), (k * 1.37).sin()]
            })
            .collect();
        (Matrix::from_rows(&rows).unwrap(), (0..n).map(|i| i % 2 == 0).collect())
    }

    #[test]
    fn single_unbagged_tree_memorizes() {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![(i as f64 * 0.91).sin(), (i as f64 * 0.13).cos()]).collect();
        let y: Vec<bool> = (0..100).map(|i| (i * 7919) % 3 == 0).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let p = ForestParams {
            n_trees: 1,
            bootstrap: false,
            ..Default::default()
        };
        let f = Forest::fit(&x, &y, &p, 3).unwrap();
        for i in 0..100 {
            assert_eq!(f.predict_proba(x.row(i)) > 0.5, y[i]);
        }
    }

    #[test]
    fn separable_held_out() {
        let (x, y) = toy(200, 0);
        let (xt, yt) = toy(200, 1000);
        let f = Forest::fit(&x, &y, &ForestParams::default(), 1).unwrap();
        let ok = (0..200).filter(|&i| (f.predict_proba(xt.row(i)) > 0.5) == yt[i]).count();
        assert!(ok as f64 / 200.0 >= 0.95);
    }

    #[test]
    fn score_granularity() {
        let (x, y) = toy(60, 0);
        let p = ForestParams {
            n_trees: 7,
            ..Default::default()
        };
        let f = Forest::fit(&x, &y, &p, 2).unwrap();
        for i in 0..60 {
            let s = f.predict_proba(&[x.row(i)[0] * 0.3, 0.0]);
            assert_eq!(s * 7.0, (s * 7.0).round());
            assert_eq!(s, f.votes(&[x.row(i)[0] * 0.3, 0.0]) as f64 / 7.0);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let (x, y) = toy(80, 0);
        let p = ForestParams {
            n_trees: 10,
            ..Default::default()
        };
        assert_eq!(Forest::fit(&x, &y, &p, 4).unwrap(), Forest::fit(&x, &y, &p, 4).unwrap());
        assert!(ForestParams { n_trees: 0, ..Default::default() }.validate().is_err());
    }
}
