//! Confusion-matrix metrics and ROC analysis.

mod roc;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};

pub use roc::{roc_curve, RocCurve};
pub(crate) use roc::escape;

/// Default score threshold for hard labels.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn record(&mut self, predicted: Label, actual: Label) {
        match (predicted, actual) {
            (Label::Positive, Label::Positive) => self.tp += 1,
            (Label::Negative, Label::Negative) => self.tn += 1,
            (Label::Positive, Label::Negative) => self.fp += 1,
            (Label::Negative, Label::Positive) => self.fn_ += 1,
        }
    }
}

pub fn confusion(predictions: &[Label], labels: &[Label]) -> Result<ConfusionMatrix> {
    if predictions.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &a) in predictions.iter().zip(labels) {
        cm.record(p, a);
    }
    Ok(cm)
}

/// Hard labels from scores: positive iff `score > threshold`.
pub fn threshold_scores(scores: &[f64], threshold: f64) -> Vec<Label> {
    scores.iter().map(|&s| Label::from_bool(s > threshold)).collect()
}

/// A ratio whose denominator may be zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    Defined(f64),
    Undefined,
}

impl Metric {
    pub fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            Metric::Undefined
        } else {
            Metric::Defined(num as f64 / den as f64)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Defined(v) => Some(v),
            Metric::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, Metric::Defined(_))
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Defined(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            Metric::Undefined => f.write_str("NA"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub accuracy: Metric,
    pub precision: Metric,
    /// Recall.
    pub sensitivity: Metric,
    pub specificity: Metric,
}

impl MetricSet {
    /// Values in report column order: precision, recall, specificity, accuracy.
    pub fn in_report_order(&self) -> [Metric; 4] {
        [self.precision, self.sensitivity, self.specificity, self.accuracy]
    }
}

pub const REPORT_COLUMNS: [&str; 4] = ["precision", "recall", "specificity", "accuracy"];

pub fn metric_set(cm: &ConfusionMatrix) -> Result<MetricSet> {
    if cm.total() == 0 {
        return Err(Error::degenerate("confusion matrix is empty"));
    }
    Ok(MetricSet {
        accuracy: Metric::ratio(cm.tp + cm.tn, cm.total()),
        precision: Metric::ratio(cm.tp, cm.tp + cm.fp),
        sensitivity: Metric::ratio(cm.tp, cm.tp + cm.fn_),
        specificity: Metric::ratio(cm.tn, cm.tn + cm.fp),
    })
}
