use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train, Family, ModelConfig};
use crate::color::{featurize, ColorSpaceId, FeatureVector};
use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::metrics::{confusion, metric_set, threshold_scores, DEFAULT_THRESHOLD};

pub const DEFAULT_GRID_CAP: usize = 256;

/// Candidate values per hyperparameter on top of a base config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub base: ModelConfig,
    pub axes: Vec<(String, Vec<f64>)>,
    pub cap: usize,
}

impl HyperGrid {
    pub fn new(base: ModelConfig) -> Self {
        HyperGrid {
            base,
            axes: Vec::new(),
            cap: DEFAULT_GRID_CAP,
        }
    }

    pub fn axis(mut self, name: &str, values: &[f64]) -> Self {
        self.axes.push((name.to_string(), values.to_vec()));
        self
    }

    /// The shipped search space for each family.
    pub fn default_for(family: Family, seed: u64) -> Self {
        let g = HyperGrid::new(ModelConfig::new(family, seed));
        match family {
            Family::Mlp => g.axis("learning_rate", &[1e-2, 1e-3, 1e-4]).axis("l2", &[1e-3, 1e-4]),
            Family::Logreg => g.axis("lambda", &[0.1, 1.0, 10.0]),
            Family::RandomForest => g.axis("n_trees", &[50.0, 100.0, 200.0]),
            Family::GradientBoosting => g.axis("n_stages", &[50.0, 100.0]).axis("shrinkage", &[0.05, 0.1]),
        }
    }

    pub fn size(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    /// Cartesian product in enumeration order: the last axis varies fastest.
    pub fn points(&self) -> Result<Vec<ModelConfig>> {
        let size = self.size();
        if size == 0 {
            return Err(Error::invalid("grid has an empty axis"));
        }
        if size > self.cap {
            return Err(Error::invalid(format!("grid has {size} points, cap is {}", self.cap)));
        }
        let mut out = Vec::with_capacity(size);
        for mut k in 0..size {
            let mut idx = vec![0; self.axes.len()];
            for (a, (_, vals)) in self.axes.iter().enumerate().rev() {
                idx[a] = k % vals.len();
                k /= vals.len();
            }
            let mut cfg = self.base.clone();
            for (a, (name, vals)) in self.axes.iter().enumerate() {
                cfg.set(name, vals[idx[a]])?;
            }
            out.push(cfg);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSearchResult {
    pub best: ModelConfig,
    pub best_index: usize,
    /// Mean CV accuracy per grid point; `None` if some fold failed to fit.
    pub scores: Vec<Option<f64>>,
}

/// Stratified fold index per sample. Each class is shuffled and dealt
/// round-robin, so every fold sees both classes when each class has at
/// least `k` members.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::invalid("need at least 2 folds"));
    }
    let mut fold = vec![0; labels.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for class in [Label::Negative, Label::Positive] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::degenerate(format!(
                "{} {} samples cannot fill {k} folds",
                members.len(),
                class.code()
            )));
        }
        members.shuffle(&mut rng);
        for (j, &i) in members.iter().enumerate() {
            fold[i] = j % k;
        }
    }
    Ok(fold)
}

/// Exhaustive k-fold search by mean accuracy. Ties go to the earliest
/// grid point.
pub fn grid_search_features(
    grid: &HyperGrid,
    features: &[FeatureVector],
    labels: &[Label],
    folds: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    let points = grid.points()?;
    let fold_of = stratified_folds(labels, folds, seed)?;
    let tasks: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..folds).map(move |f| (p, f))).collect();
    let results: Vec<Result<Option<f64>>> = tasks
        .par_iter()
        .map(|&(p, f)| {
            let (mut tx, mut ty, mut vx, mut vy) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for (i, v) in features.iter().enumerate() {
                if fold_of[i] == f {
                    vx.push(v.clone());
                    vy.push(labels[i]);
                } else {
                    tx.push(v.clone());
                    ty.push(labels[i]);
                }
            }
            match train(&tx, &ty, &points[p]) {
                Ok(m) => {
                    let pred = threshold_scores(&m.predict_scores(&vx)?, DEFAULT_THRESHOLD);
                    Ok(metric_set(&confusion(&pred, &vy)?)?.accuracy.value())
                }
                // a config that cannot be fitted loses, it does not abort the search
                Err(Error::Degenerate(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut scores = Vec::with_capacity(points.len());
    for p in 0..points.len() {
        let mut sum = 0.0;
        let mut ok = true;
        for f in 0..folds {
            match &results[p * folds + f] {
                Ok(Some(a)) => sum += a,
                Ok(None) => ok = false,
                Err(e) => return Err(Error::invalid(format!("grid point {p}, fold {f}: {e}"))),
            }
        }
        scores.push(ok.then(|| sum / folds as f64));
    }
    let mut best: Option<(usize, f64)> = None;
    for (p, s) in scores.iter().enumerate() {
        if let Some(s) = *s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((p, s));
            }
        }
    }
    let (best_index, _) = best.ok_or_else(|| Error::degenerate("no grid point could be fitted"))?;
    Ok(GridSearchResult {
        best: points[best_index].clone(),
        best_index,
        scores,
    })
}

pub fn grid_search(grid: &HyperGrid, train: &Dataset, space: ColorSpaceId, folds: usize, seed: u64) -> Result<GridSearchResult> {
    train.require_non_empty("grid search")?;
    let features = train.samples().iter().map(|s| featurize(s, space)).collect::<Result<Vec<_>>>()?;
    grid_search_features(grid, &features, &train.labels(), folds, seed)
}
