//! Binary classifiers over color features: MLP, logistic regression,
//! random forest and gradient boosting, plus cross-validated grid search.
//!
//! Every model standardizes its inputs with statistics fitted on its own
//! training set, so callers always pass raw feature vectors.

mod boosting;
mod forest;
mod grid;
mod logreg;
mod matrix;
mod mlp;
mod tree;

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::color::{fit_standardizer, ColorSpaceId, FeatureVector, StandardizationStats};
use crate::data::Label;
use crate::error::{Error, Result};

pub use boosting::{Booster, BoostingParams};
pub use forest::{Forest, ForestParams};
pub use grid::{grid_search, grid_search_features, stratified_folds, GridSearchResult, HyperGrid, DEFAULT_GRID_CAP};
pub use logreg::{Logreg, LogregParams};
pub use matrix::Matrix;
pub use mlp::{Mlp, MlpParams};
pub use tree::{Node, Tree, TreeParams};

pub const MODEL_FORMAT: &str = "stripscreen-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Mlp,
    Logreg,
    RandomForest,
    GradientBoosting,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Mlp, Family::Logreg, Family::RandomForest, Family::GradientBoosting];

    pub fn name(self) -> &'static str {
        match self {
            Family::Mlp => "mlp",
            Family::Logreg => "logreg",
            Family::RandomForest => "random_forest",
            Family::GradientBoosting => "gradient_boosting",
        }
    }

    /// Row label in metric tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Family::Mlp => "MLP",
            Family::Logreg => "Logistic Regression",
            Family::RandomForest => "Random Forest",
            Family::GradientBoosting => "Gradient Boosting",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "mlp" => Ok(Family::Mlp),
            "logreg" | "logistic_regression" => Ok(Family::Logreg),
            "random_forest" | "rf" => Ok(Family::RandomForest),
            "gradient_boosting" | "gb" => Ok(Family::GradientBoosting),
            other => Err(Error::invalid(format!(
                "unknown model family '{other}' (expected mlp, logreg, random_forest or gradient_boosting)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum FamilyParams {
    Mlp(MlpParams),
    Logreg(LogregParams),
    RandomForest(ForestParams),
    GradientBoosting(BoostingParams),
}

impl FamilyParams {
    pub fn default_for(family: Family) -> Self {
        match family {
            Family::Mlp => FamilyParams::Mlp(MlpParams::default()),
            Family::Logreg => FamilyParams::Logreg(LogregParams::default()),
            Family::RandomForest => FamilyParams::RandomForest(ForestParams::default()),
            Family::GradientBoosting => FamilyParams::GradientBoosting(BoostingParams::default()),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Mlp(_) => Family::Mlp,
            FamilyParams::Logreg(_) => Family::Logreg,
            FamilyParams::RandomForest(_) => Family::RandomForest,
            FamilyParams::GradientBoosting(_) => Family::GradientBoosting,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FamilyParams::Mlp(p) => p.validate(),
            FamilyParams::Logreg(p) => p.validate(),
            FamilyParams::RandomForest(p) => p.validate(),
            FamilyParams::GradientBoosting(p) => p.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub params: FamilyParams,
    pub seed: u64,
}

fn as_count(name: &str, v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(Error::invalid(format!("{name} must be a nonnegative integer, got {v}")))
    }
}

impl ModelConfig {
    pub fn new(family: Family, seed: u64) -> Self {
        ModelConfig {
            params: FamilyParams::default_for(family),
            seed,
        }
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Sets one numeric hyperparameter by name. Integer-valued settings must
    /// be given as whole numbers; for `max_depth` and `max_features` a value
    /// of 0 means "no limit" / "default".
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let unknown = |family: Family| Err(Error::invalid(format!("{family} has no hyperparameter '{name}'")));
        match &mut self.params {
            FamilyParams::Mlp(p) => match name {
                "learning_rate" => p.learning_rate = value,
                "l2" => p.l2 = value,
                "beta1" => p.beta1 = value,
                "beta2" => p.beta2 = value,
                "epsilon" => p.epsilon = value,
                "batch_size" => p.batch_size = as_count(name, value)?,
                "epochs" => p.epochs = as_count(name, value)?,
                _ => return unknown(Family::Mlp),
            },
            FamilyParams::Logreg(p) => match name {
                "lambda" => p.lambda = value,
                "tolerance" => p.tolerance = value,
                "max_iter" => p.max_iter = as_count(name, value)?,
                _ => return unknown(Family::Logreg),
            },
            FamilyParams::RandomForest(p) => match name {
                "n_trees" => p.n_trees = as_count(name, value)?,
                "min_samples_split" => p.min_samples_split = as_count(name, value)?,
                "max_depth" => p.max_depth = Some(as_count(name, value)?).filter(|&d| d > 0),
                "max_features" => p.max_features = Some(as_count(name, value)?).filter(|&d| d > 0),
                _ => return unknown(Family::RandomForest),
            },
            FamilyParams::GradientBoosting(p) => match name {
                "n_stages" => p.n_stages = as_count(name, value)?,
                "shrinkage" => p.shrinkage = value,
                "max_depth" => p.max_depth = as_count(name, value)?,
                "min_samples_split" => p.min_samples_split = as_count(name, value)?,
                _ => return unknown(Family::GradientBoosting),
            },
        }
        Ok(())
    }

    /// Parses a TOML config: `family` and optional `seed` at the top level,
    /// every other key is a hyperparameter of that family.
    ///
    /// ```
    /// use stripscreen::learners::{Family, FamilyParams, ModelConfig};
    /// let cfg = ModelConfig::from_toml_str("family = \"mlp\"\nseed = 3\nlearning_rate = 0.01\n").unwrap();
    /// assert_eq!(cfg.family(), Family::Mlp);
    /// let FamilyParams::Mlp(p) = &cfg.params else { unreachable!() };
    /// assert_eq!(p.learning_rate, 0.01);
    /// assert_eq!(p.hidden, vec![3, 2]);
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::data(format!("model config: {e}")))?;
        let family: Family = match table.remove("family") {
            Some(toml::Value::String(s)) => s.parse()?,
            Some(_) => return Err(Error::data("model config: family must be a string")),
            None => return Err(Error::data("model config: missing 'family'")),
        };
        let seed = match table.remove("seed") {
            Some(toml::Value::Integer(s)) if s >= 0 => s as u64,
            Some(_) => return Err(Error::data("model config: seed must be a nonnegative integer")),
            None => 0,
        };
        let rest = toml::Value::Table(table);
        let bad = |e: toml::de::Error| Error::data(format!("model config ({family}): {e}"));
        let params = match family {
            Family::Mlp => FamilyParams::Mlp(rest.try_into().map_err(bad)?),
            Family::Logreg => FamilyParams::Logreg(rest.try_into().map_err(bad)?),
            Family::RandomForest => FamilyParams::RandomForest(rest.try_into().map_err(bad)?),
            Family::GradientBoosting => FamilyParams::GradientBoosting(rest.try_into().map_err(bad)?),
        };
        let cfg = ModelConfig { params, seed };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Fitted {
    Mlp(Mlp),
    Logreg(Logreg),
    RandomForest(Forest),
    GradientBoosting(Booster),
}

impl Fitted {
    fn proba(&self, x: &[f64]) -> f64 {
        match self {
            Fitted::Mlp(m) => m.predict_proba(x),
            Fitted::Logreg(m) => m.predict_proba(x),
            Fitted::RandomForest(m) => m.predict_proba(x),
            Fitted::GradientBoosting(m) => m.predict_proba(x),
        }
    }
}

/// A fitted scorer together with the standardization it was trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    space: ColorSpaceId,
    stats: StandardizationStats,
    config: ModelConfig,
    fitted: Fitted,
}

#[derive(Serialize, Deserialize)]
struct ModelHeader {
    format: String,
    version: u32,
    family: Family,
    space: ColorSpaceId,
    stats: StandardizationStats,
    config: ModelConfig,
}

fn check_raw(features: &[FeatureVector]) -> Result<ColorSpaceId> {
    let first = features.first().ok_or_else(|| Error::invalid("no training vectors"))?;
    for v in features {
        if v.standardized {
            return Err(Error::invalid("training vectors are already standardized"));
        }
        if v.space != first.space {
            return Err(Error::invalid(format!("mixed color spaces: {} and {}", first.space, v.space)));
        }
        if v.values.len() != first.values.len() {
            return Err(Error::invalid("feature vectors differ in length"));
        }
    }
    Ok(first.space)
}

/// Fits the model described by `cfg` on raw (unstandardized) vectors.
pub fn train(features: &[FeatureVector], labels: &[Label], cfg: &ModelConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    if features.len() != labels.len() {
        return Err(Error::invalid(format!("{} vectors for {} labels", features.len(), labels.len())));
    }
    let space = check_raw(features)?;
    if features.iter().any(|v| v.values.iter().any(|x| !x.is_finite())) {
        return Err(Error::invalid("non-finite feature values"));
    }
    let stats = fit_standardizer(features)?;
    let dim = stats.dim();
    let mut data = vec![0.0; features.len() * dim];
    for (row, v) in data.chunks_mut(dim).zip(features) {
        stats.transform_slice(&v.values, row);
    }
    let x = Matrix::new(features.len(), dim, data)?;
    let y: Vec<bool> = labels.iter().map(|l| l.is_positive()).collect();
    let fitted = match &cfg.params {
        FamilyParams::Mlp(p) => Fitted::Mlp(Mlp::fit(&x, &y, p, cfg.seed)?),
        FamilyParams::Logreg(p) => Fitted::Logreg(Logreg::fit(&x, &y, p)?),
        FamilyParams::RandomForest(p) => Fitted::RandomForest(Forest::fit(&x, &y, p, cfg.seed)?),
        FamilyParams::GradientBoosting(p) => Fitted::GradientBoosting(Booster::fit(&x, &y, p, cfg.seed)?),
    };
    Ok(TrainedModel {
        space,
        stats,
        config: cfg.clone(),
        fitted,
    })
}

fn train_family(family: Family, features: &[FeatureVector], labels: &[Label], cfg: &ModelConfig) -> Result<TrainedModel> {
    if cfg.family() != family {
        return Err(Error::invalid(format!("expected a {family} config, got {}", cfg.family())));
    }
    train(features, labels, cfg)
}

pub fn train_mlp(features: &[FeatureVector], labels: &[Label], cfg: &ModelConfig) -> Result<TrainedModel> {
    train_family(Family::Mlp, features, labels, cfg)
}

pub fn train_logreg(features: &[FeatureVector], labels: &[Label], cfg: &ModelConfig) -> Result<TrainedModel> {
    train_family(Family::Logreg, features, labels, cfg)
}

pub fn train_random_forest(features: &[FeatureVector], labels: &[Label], cfg: &ModelConfig) -> Result<TrainedModel> {
    train_family(Family::RandomForest, features, labels, cfg)
}

pub fn train_gradient_boosting(features: &[FeatureVector], labels: &[Label], cfg: &ModelConfig) -> Result<TrainedModel> {
    train_family(Family::GradientBoosting, features, labels, cfg)
}

impl TrainedModel {
    pub fn family(&self) -> Family {
        self.config.family()
    }

    pub fn space(&self) -> ColorSpaceId {
        self.space
    }

    pub fn stats(&self) -> &StandardizationStats {
        &self.stats
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn fitted(&self) -> &Fitted {
        &self.fitted
    }

    /// Probability-like score in [0, 1] for a raw feature vector.
    pub fn predict_score(&self, v: &FeatureVector) -> Result<f64> {
        if v.space != self.space {
            return Err(Error::invalid(format!("model fitted on {} got a {} vector", self.space, v.space)));
        }
        if v.standardized {
            return Err(Error::invalid("pass raw feature vectors; the model standardizes internally"));
        }
        if v.values.len() != self.stats.dim() {
            return Err(Error::invalid(format!("expected {} features, got {}", self.stats.dim(), v.values.len())));
        }
        let mut z = vec![0.0; v.values.len()];
        self.stats.transform_slice(&v.values, &mut z);
        Ok(self.fitted.proba(&z).clamp(0.0, 1.0))
    }

    pub fn predict_scores(&self, vs: &[FeatureVector]) -> Result<Vec<f64>> {
        vs.iter().map(|v| self.predict_score(v)).collect()
    }

    /// Header line of JSON, then the fitted parameters as bincode.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = ModelHeader {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_FORMAT_VERSION,
            family: self.family(),
            space: self.space,
            stats: self.stats.clone(),
            config: self.config.clone(),
        };
        let line = serde_json::to_string(&header).map_err(|e| Error::Format(e.to_string()))?;
        let body = bincode::serialize(&self.fitted).map_err(|e| Error::Format(e.to_string()))?;
        let io = |e| Error::io("<model stream>", e);
        w.write_all(line.as_bytes()).map_err(io)?;
        w.write_all(b"\n").map_err(io)?;
        w.write_all(&(body.len() as u64).to_le_bytes()).map_err(io)?;
        w.write_all(&body).map_err(io)?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<TrainedModel> {
        let mut line = String::new();
        r.read_line(&mut line).map_err(|e| Error::Format(format!("model header: {e}")))?;
        let header: ModelHeader =
            serde_json::from_str(line.trim_end()).map_err(|e| Error::Format(format!("model header: {e}")))?;
        if header.format != MODEL_FORMAT {
            return Err(Error::Format(format!("not a model file (format '{}')", header.format)));
        }
        if header.version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported model version {}", header.version)));
        }
        if header.family != header.config.family() || header.space != header.stats.space {
            return Err(Error::Format("model header is inconsistent".into()));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len).map_err(|e| Error::Format(format!("model body: {e}")))?;
        let mut body = vec![0u8; u64::from_le_bytes(len) as usize];
        r.read_exact(&mut body).map_err(|e| Error::Format(format!("model body: {e}")))?;
        let fitted: Fitted = bincode::deserialize(&body).map_err(|e| Error::Format(format!("model body: {e}")))?;
        let tag = match &fitted {
            Fitted::Mlp(_) => Family::Mlp,
            Fitted::Logreg(_) => Family::Logreg,
            Fitted::RandomForest(_) => Family::RandomForest,
            Fitted::GradientBoosting(_) => Family::GradientBoosting,
        };
        if tag != header.family {
            return Err(Error::Format(format!("header says {} but body holds {tag}", header.family)));
        }
        Ok(TrainedModel {
            space: header.space,
            stats: header.stats,
            config: header.config,
            fitted,
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        self.write_to(&mut out)?;
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<TrainedModel> {
        Self::read_from(bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TrainedModel> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
