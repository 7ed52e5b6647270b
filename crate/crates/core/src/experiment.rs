//! Repeated hold-out evaluation: per rep a fresh split, one model per
//! (space, family) cell, and optionally the vote ensemble over all spaces.
//!
//! Rep `i` splits with seed `master_seed + i`; the model for space `s` in
//! that rep is seeded with `master_seed + i + s.index()`, which is exactly
//! the member seed the ensemble would use, so the ensemble row reuses the
//! per-space models instead of fitting them again.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::{featurize, ColorSpaceId, FeatureVector};
use crate::data::{split, Dataset, Label};
use crate::ensemble::{count_votes, majority_predict, member_seed, sweep_from_votes, AbstentionRule, SweepRow};
use crate::error::{Error, Result};
use crate::learners::{grid_search_features, train, Family, HyperGrid, ModelConfig};
use crate::metrics::{confusion, metric_set, threshold_scores, ConfusionMatrix, Metric, MetricSet, DEFAULT_THRESHOLD, REPORT_COLUMNS};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tuning {
    /// Use the configured hyperparameters as they are.
    Fixed,
    /// Grid search once on rep 0's training split, reuse for every rep.
    #[default]
    GridOnce,
    /// Grid search inside every rep on that rep's training split.
    GridPerRep,
}

impl std::str::FromStr for Tuning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Tuning::Fixed),
            "grid-once" | "grid_once" => Ok(Tuning::GridOnce),
            "grid-per-rep" | "grid_per_rep" => Ok(Tuning::GridPerRep),
            _ => Err(Error::invalid(format!("unknown tuning mode '{s}' (fixed, grid-once, grid-per-rep)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub spaces: Vec<ColorSpaceId>,
    pub families: Vec<Family>,
    pub reps: usize,
    pub test_fraction: f64,
    pub master_seed: u64,
    pub stratified: bool,
    pub tuning: Tuning,
    pub folds: usize,
    /// Per-family overrides of the default hyperparameters.
    pub configs: BTreeMap<Family, ModelConfig>,
    /// Per-family overrides of the default search space.
    pub grids: BTreeMap<Family, HyperGrid>,
    /// Adds a vote-ensemble row built from this family's members.
    pub ensemble: Option<Family>,
    pub abstention_rule: AbstentionRule,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            spaces: ColorSpaceId::ALL.to_vec(),
            families: Family::ALL.to_vec(),
            reps: 30,
            test_fraction: 0.1,
            master_seed: 0,
            stratified: true,
            tuning: Tuning::default(),
            folds: 3,
            configs: BTreeMap::new(),
            grids: BTreeMap::new(),
            ensemble: None,
            abstention_rule: AbstentionRule::Symmetric,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::invalid("reps must be at least 1"));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::invalid(format!("test fraction must lie in (0, 1), got {}", self.test_fraction)));
        }
        if self.spaces.is_empty() || self.families.is_empty() {
            return Err(Error::invalid("plan needs at least one space and one family"));
        }
        if self.tuning != Tuning::Fixed && self.folds < 2 {
            return Err(Error::invalid("grid search needs at least 2 folds"));
        }
        for (f, c) in &self.configs {
            if c.family() != *f {
                return Err(Error::invalid(format!("config for {f} describes {}", c.family())));
            }
            c.validate()?;
        }
        if let Some(f) = self.ensemble {
            if !self.families.contains(&f) {
                return Err(Error::invalid(format!("ensemble family {f} is not among the plan's families")));
            }
            let mut s = self.spaces.clone();
            s.sort();
            s.dedup();
            if s != ColorSpaceId::ALL {
                return Err(Error::invalid("the ensemble row needs all 11 color spaces"));
            }
        }
        Ok(())
    }

    fn normalized(&self) -> ExperimentPlan {
        let mut p = self.clone();
        p.spaces.sort();
        p.spaces.dedup();
        p.families.sort();
        p.families.dedup();
        p
    }

    pub fn base_config(&self, family: Family) -> ModelConfig {
        self.configs.get(&family).cloned().unwrap_or_else(|| ModelConfig::new(family, 0))
    }

    pub fn grid(&self, family: Family) -> HyperGrid {
        let mut g = self.grids.get(&family).cloned().unwrap_or_else(|| HyperGrid::default_for(family, 0));
        if let Some(c) = self.configs.get(&family) {
            g.base = c.clone();
        }
        g
    }

    pub fn split_seed(&self, rep: usize) -> u64 {
        self.master_seed.wrapping_add(rep as u64)
    }
}

/// Outcome of fitting and testing one model on one split.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleRun {
    pub metrics: MetricSet,
    pub confusion: ConfusionMatrix,
    pub scores: Vec<f64>,
    pub config: ModelConfig,
}

fn features(ds: &Dataset, space: ColorSpaceId) -> Result<Vec<FeatureVector>> {
    ds.samples().iter().map(|s| featurize(s, space)).collect()
}

/// Featurize both splits, fit on train, score and threshold the test split.
pub fn run_single(space: ColorSpaceId, config: &ModelConfig, train_set: &Dataset, test_set: &Dataset) -> Result<SingleRun> {
    train_set.require_non_empty("training split")?;
    test_set.require_non_empty("test split")?;
    let model = train(&features(train_set, space)?, &train_set.labels(), config)?;
    let scores = model.predict_scores(&features(test_set, space)?)?;
    let cm = confusion(&threshold_scores(&scores, DEFAULT_THRESHOLD), &test_set.labels())?;
    Ok(SingleRun {
        metrics: metric_set(&cm)?,
        confusion: cm,
        scores,
        config: config.clone(),
    })
}

/// Mean and spread over reps of one metric. Undefined reps are counted,
/// not averaged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: Option<f64>,
    /// Sample standard deviation; 0 for a single defined value.
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub defined: usize,
    pub undefined: usize,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = Metric>) -> Summary {
        let (mut vals, mut undefined) = (Vec::new(), 0);
        for m in values {
            match m.value() {
                Some(v) => vals.push(v),
                None => undefined += 1,
            }
        }
        if vals.is_empty() {
            return Summary {
                mean: None,
                std: None,
                min: None,
                max: None,
                defined: 0,
                undefined,
            };
        }
        let n = vals.len() as f64;
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // clamped so rounding cannot push the mean outside [min, max]
        let mean = (vals.iter().sum::<f64>() / n).clamp(min, max);
        let std = if vals.len() > 1 {
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Summary {
            mean: Some(mean),
            std: Some(std),
            min: Some(min),
            max: Some(max),
            defined: vals.len(),
            undefined,
        }
    }
}

/// Which model a report row describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowModel {
    Single(Family),
    Ensemble(Family),
}

impl RowModel {
    pub fn name(self) -> String {
        match self {
            RowModel::Single(f) => f.name().to_string(),
            RowModel::Ensemble(f) => format!("ensemble_{}", f.name()),
        }
    }

    pub fn display_name(self) -> String {
        match self {
            RowModel::Single(f) => f.display_name().to_string(),
            RowModel::Ensemble(_) => "Ensemble".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedMetrics {
    /// `None` for the ensemble row, which spans every space.
    pub space: Option<ColorSpaceId>,
    pub model: RowModel,
    pub precision: Summary,
    pub recall: Summary,
    pub specificity: Summary,
    pub accuracy: Summary,
    pub reps: usize,
}

impl AveragedMetrics {
    fn from_runs(space: Option<ColorSpaceId>, model: RowModel, runs: &[MetricSet]) -> Self {
        AveragedMetrics {
            space,
            model,
            precision: Summary::of(runs.iter().map(|m| m.precision)),
            recall: Summary::of(runs.iter().map(|m| m.sensitivity)),
            specificity: Summary::of(runs.iter().map(|m| m.specificity)),
            accuracy: Summary::of(runs.iter().map(|m| m.accuracy)),
            reps: runs.len(),
        }
    }

    /// Report column order.
    pub fn summaries(&self) -> [&Summary; 4] {
        [&self.precision, &self.recall, &self.specificity, &self.accuracy]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepRecord {
    pub rep: usize,
    pub split_seed: u64,
    pub space: Option<ColorSpaceId>,
    pub model: String,
    pub confusion: ConfusionMatrix,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedSweepRow {
    pub k: u8,
    pub response_ratio: Summary,
    pub accuracy: Summary,
    pub recall: Summary,
    pub specificity: Summary,
    pub healthy_extracted: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub plan: ExperimentPlan,
    /// Tuned or fixed config per (space, family) used by rep 0.
    pub configs: Vec<(ColorSpaceId, Family, ModelConfig)>,
    pub cells: Vec<AveragedMetrics>,
    pub per_rep: Vec<RepRecord>,
    pub sweep: Option<Vec<AveragedSweepRow>>,
    pub per_rep_sweep: Vec<Vec<SweepRow>>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{:.2}", 100.0 * x))
}

impl ExperimentReport {
    pub fn cell(&self, space: Option<ColorSpaceId>, model: RowModel) -> Option<&AveragedMetrics> {
        self.cells.iter().find(|c| c.space == space && c.model == model)
    }

    pub fn ensemble_row(&self) -> Option<&AveragedMetrics> {
        self.cells.iter().find(|c| matches!(c.model, RowModel::Ensemble(_)))
    }

    /// Full-precision CSV, one row per (space, model).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("space,model");
        for c in REPORT_COLUMNS {
            let _ = write!(out, ",{c}");
        }
        for c in REPORT_COLUMNS {
            let _ = write!(out, ",{c}_std");
        }
        for c in REPORT_COLUMNS {
            let _ = write!(out, ",{c}_undefined");
        }
        out.push_str(",reps\n");
        for cell in &self.cells {
            let space = cell.space.map_or("all", |s| s.name());
            let _ = write!(out, "{space},{}", cell.model.name());
            for s in cell.summaries() {
                let _ = write!(out, ",{}", opt(s.mean));
            }
            for s in cell.summaries() {
                let _ = write!(out, ",{}", opt(s.std));
            }
            for s in cell.summaries() {
                let _ = write!(out, ",{}", s.undefined);
            }
            let _ = writeln!(out, ",{}", cell.reps);
        }
        out
    }

    /// Percentages to two decimals, one block per color space.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut last: Option<Option<ColorSpaceId>> = None;
        for cell in &self.cells {
            if last != Some(cell.space) {
                if last.is_some() {
                    out.push('\n');
                }
                let title = cell.space.map_or("all spaces (vote ensemble)".to_string(), |s| format!("color space {s}"));
                let _ = writeln!(out, "{title}, {} reps", cell.reps);
                let _ = writeln!(out, "{:<22} {:>10} {:>10} {:>12} {:>10}", "Model", "Precision", "Recall", "Specificity", "Accuracy");
                last = Some(cell.space);
            }
            let [p, r, s, a] = cell.summaries();
            let _ = writeln!(
                out,
                "{:<22} {:>10} {:>10} {:>12} {:>10}",
                cell.model.display_name(),
                pct(p.mean),
                pct(r.mean),
                pct(s.mean),
                pct(a.mean)
            );
        }
        out
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.per_rep {
            out.push_str(&serde_json::to_string(r).map_err(|e| Error::Format(e.to_string()))?);
            out.push('\n');
        }
        Ok(out)
    }

    /// Averaged abstention sweep; `None` without an ensemble row.
    pub fn sweep_csv(&self) -> Option<String> {
        let rows = self.sweep.as_ref()?;
        let mut out = String::from("k,response_ratio,accuracy,recall,specificity,healthy_extracted,accuracy_undefined,recall_undefined,specificity_undefined\n");
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.k,
                opt(r.response_ratio.mean),
                opt(r.accuracy.mean),
                opt(r.recall.mean),
                opt(r.specificity.mean),
                opt(r.healthy_extracted.mean),
                r.accuracy.undefined,
                r.recall.undefined,
                r.specificity.undefined
            );
        }
        Some(out)
    }
}

fn tune(plan: &ExperimentPlan, family: Family, space: ColorSpaceId, train_set: &Dataset, seed: u64) -> Result<ModelConfig> {
    match plan.tuning {
        Tuning::Fixed => Ok(plan.base_config(family)),
        Tuning::GridOnce | Tuning::GridPerRep => {
            let x = features(train_set, space)?;
            Ok(grid_search_features(&plan.grid(family), &x, &train_set.labels(), plan.folds, seed)?.best)
        }
    }
}

fn record(rep: usize, split_seed: u64, space: Option<ColorSpaceId>, model: String, cm: ConfusionMatrix, m: &MetricSet) -> RepRecord {
    RepRecord {
        rep,
        split_seed,
        space,
        model,
        confusion: cm,
        precision: m.precision.value(),
        recall: m.sensitivity.value(),
        specificity: m.specificity.value(),
        accuracy: m.accuracy.value(),
    }
}

/// Runs every rep of the plan. Output does not depend on thread count or
/// on the order spaces and families are listed in.
pub fn run_repeated(ds: &Dataset, plan: &ExperimentPlan) -> Result<ExperimentReport> {
    plan.validate()?;
    let plan = plan.normalized();
    ds.require_non_empty("experiment")?;

    let splits: Vec<(Dataset, Dataset)> = (0..plan.reps)
        .map(|rep| split(ds, plan.test_fraction, plan.split_seed(rep), plan.stratified).map_err(|e| Error::invalid(format!("rep {rep}: {e}"))))
        .collect::<Result<_>>()?;

    let cells: Vec<(ColorSpaceId, Family)> = plan.spaces.iter().flat_map(|&s| plan.families.iter().map(move |&f| (s, f))).collect();

    // configs shared by all reps, or None when tuned per rep
    let shared: Vec<Option<ModelConfig>> = match plan.tuning {
        Tuning::GridPerRep => vec![None; cells.len()],
        _ => cells
            .par_iter()
            .map(|&(s, f)| tune(&plan, f, s, &splits[0].0, plan.master_seed).map(Some))
            .collect::<Result<_>>()
            .map_err(|e| Error::invalid(format!("tuning: {e}")))?,
    };

    let tasks: Vec<(usize, usize)> = (0..plan.reps).flat_map(|r| (0..cells.len()).map(move |c| (r, c))).collect();
    let runs: Vec<SingleRun> = tasks
        .par_iter()
        .map(|&(rep, c)| {
            let (space, family) = cells[c];
            let (train_set, test_set) = &splits[rep];
            let seed = plan.split_seed(rep);
            let cfg = match &shared[c] {
                Some(cfg) => cfg.clone(),
                None => tune(&plan, family, space, train_set, seed)?,
            };
            run_single(space, &cfg.with_seed(member_seed(seed, space)), train_set, test_set)
                .map_err(|e| Error::invalid(format!("rep {rep}, {space}/{family}: {e}")))
        })
        .collect::<Result<_>>()?;
    let run = |rep: usize, c: usize| &runs[rep * cells.len() + c];

    let mut per_rep = Vec::with_capacity(runs.len());
    for rep in 0..plan.reps {
        for (c, &(space, family)) in cells.iter().enumerate() {
            let r = run(rep, c);
            per_rep.push(record(rep, plan.split_seed(rep), Some(space), family.name().into(), r.confusion, &r.metrics));
        }
    }
    let mut averaged: Vec<AveragedMetrics> = cells
        .iter()
        .enumerate()
        .map(|(c, &(space, family))| {
            let ms: Vec<MetricSet> = (0..plan.reps).map(|rep| run(rep, c).metrics).collect();
            AveragedMetrics::from_runs(Some(space), RowModel::Single(family), &ms)
        })
        .collect();

    let (mut sweep, mut per_rep_sweep) = (None, Vec::new());
    if let Some(ens) = plan.ensemble {
        let member_cells: Vec<usize> = plan.spaces.iter().map(|&s| cells.iter().position(|&c| c == (s, ens)).expect("validated")).collect();
        let mut ms = Vec::with_capacity(plan.reps);
        for (rep, (_, test_set)) in splits.iter().enumerate() {
            let labels: Vec<Label> = test_set.labels();
            let votes: Vec<u8> = (0..labels.len())
                .map(|i| count_votes(&member_cells.iter().map(|&c| run(rep, c).scores[i]).collect::<Vec<_>>()))
                .collect();
            let pred = votes.iter().map(|&v| majority_predict(v)).collect::<Result<Vec<_>>>()?;
            let cm = confusion(&pred, &labels)?;
            let m = metric_set(&cm)?;
            per_rep.push(record(rep, plan.split_seed(rep), None, RowModel::Ensemble(ens).name(), cm, &m));
            ms.push(m);
            per_rep_sweep.push(sweep_from_votes(&votes, &labels, plan.abstention_rule)?);
        }
        averaged.push(AveragedMetrics::from_runs(None, RowModel::Ensemble(ens), &ms));
        sweep = Some(average_sweeps(&per_rep_sweep));
    }

    let configs = cells
        .iter()
        .enumerate()
        .map(|(c, &(s, f))| (s, f, run(0, c).config.clone()))
        .collect();
    Ok(ExperimentReport {
        plan,
        configs,
        cells: averaged,
        per_rep,
        sweep,
        per_rep_sweep,
    })
}

/// Row-wise mean of per-rep sweeps with the same k order.
pub fn average_sweeps(reps: &[Vec<SweepRow>]) -> Vec<AveragedSweepRow> {
    let Some(first) = reps.first() else { return Vec::new() };
    (0..first.len())
        .map(|i| {
            let col = |f: fn(&SweepRow) -> Metric| Summary::of(reps.iter().map(|r| f(&r[i])));
            AveragedSweepRow {
                k: first[i].k,
                response_ratio: col(|r| Metric::Defined(r.response_ratio)),
                accuracy: col(|r| r.accuracy),
                recall: col(|r| r.recall),
                specificity: col(|r| r.specificity),
                healthy_extracted: col(|r| r.healthy_extracted),
            }
        })
        .collect()
}
