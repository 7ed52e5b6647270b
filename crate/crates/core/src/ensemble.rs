//! One model per color space, combined by counting positive votes, with an
//! optional abstention band around the majority threshold.

use std::fmt;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::{featurize, ColorSpaceId, SPACE_COUNT};
use crate::data::{Dataset, Label, StripSample};
use crate::error::{Error, Result};
use crate::learners::{train, Family, ModelConfig, TrainedModel};
use crate::metrics::{metric_set, ConfusionMatrix, Metric, DEFAULT_THRESHOLD};

pub const ENSEMBLE_SIZE: usize = SPACE_COUNT;
/// Smallest vote count that is a strict majority of the ensemble.
pub const MAJORITY: u8 = 6;
pub const SWEEP_KS: std::ops::RangeInclusive<u8> = 6..=11;

pub const ENSEMBLE_FORMAT: &str = "stripscreen-ensemble";
pub const ENSEMBLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Triage {
    Positive,
    Negative,
    InsufficientInformation,
}

impl Triage {
    pub fn code(self) -> &'static str {
        match self {
            Triage::Positive => "positive",
            Triage::Negative => "negative",
            Triage::InsufficientInformation => "insufficient_information",
        }
    }

    pub fn label(self) -> Option<Label> {
        match self {
            Triage::Positive => Some(Label::Positive),
            Triage::Negative => Some(Label::Negative),
            Triage::InsufficientInformation => None,
        }
    }
}

impl fmt::Display for Triage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// How votes below the positive threshold are resolved.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbstentionRule {
    /// Negative iff `v <= 11 - k`; the band in between abstains.
    #[default]
    Symmetric,
    /// Negative iff `v <= 5` whatever `k` is.
    Asymmetric,
}

impl FromStr for AbstentionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(AbstentionRule::Symmetric),
            "asymmetric" => Ok(AbstentionRule::Asymmetric),
            _ => Err(Error::invalid(format!("unknown abstention rule '{s}' (symmetric or asymmetric)"))),
        }
    }
}

fn check_votes(v: u8) -> Result<()> {
    if v as usize > ENSEMBLE_SIZE {
        return Err(Error::invalid(format!("vote count {v} exceeds ensemble size {ENSEMBLE_SIZE}")));
    }
    Ok(())
}

fn check_k(k: u8) -> Result<()> {
    if !SWEEP_KS.contains(&k) {
        return Err(Error::invalid(format!("k must be in 6..=11, got {k}")));
    }
    Ok(())
}

pub fn majority_predict(v: u8) -> Result<Label> {
    check_votes(v)?;
    Ok(Label::from_bool(v >= MAJORITY))
}

pub fn abstaining_predict(v: u8, k: u8) -> Result<Triage> {
    abstaining_predict_with(v, k, AbstentionRule::Symmetric)
}

pub fn abstaining_predict_with(v: u8, k: u8, rule: AbstentionRule) -> Result<Triage> {
    check_votes(v)?;
    check_k(k)?;
    let negative_max = match rule {
        AbstentionRule::Symmetric => ENSEMBLE_SIZE as u8 - k,
        AbstentionRule::Asymmetric => MAJORITY - 1,
    };
    Ok(if v >= k {
        Triage::Positive
    } else if v <= negative_max {
        Triage::Negative
    } else {
        Triage::InsufficientInformation
    })
}

pub fn ensemble_score(v: u8) -> Result<f64> {
    check_votes(v)?;
    Ok(v as f64 / ENSEMBLE_SIZE as f64)
}

/// Count of member scores strictly above 0.5.
pub fn count_votes(member_scores: &[f64]) -> u8 {
    member_scores.iter().filter(|&&s| s > DEFAULT_THRESHOLD).count() as u8
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    family: Family,
    /// In `ColorSpaceId::ALL` order.
    members: Vec<TrainedModel>,
}

#[derive(Serialize, Deserialize)]
struct EnsembleHeader {
    format: String,
    version: u32,
    family: Family,
    spaces: Vec<ColorSpaceId>,
}

/// Member seed for a space: `seed + space index`.
pub fn member_seed(seed: u64, space: ColorSpaceId) -> u64 {
    seed.wrapping_add(space.index() as u64)
}

/// Fits one member per color space on the same training split.
pub fn train_ensemble(train_set: &Dataset, config: &ModelConfig, seed: u64) -> Result<EnsembleModel> {
    train_set.require_non_empty("ensemble training")?;
    let labels = train_set.labels();
    let members = ColorSpaceId::ALL
        .par_iter()
        .map(|&space| {
            let x = train_set.samples().iter().map(|s| featurize(s, space)).collect::<Result<Vec<_>>>()?;
            let cfg = config.clone().with_seed(member_seed(seed, space));
            train(&x, &labels, &cfg).map_err(|e| Error::degenerate(format!("{space} member: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    EnsembleModel::from_members(members)
}

impl EnsembleModel {
    /// Members may come in any order; they are stored by space.
    pub fn from_members(mut members: Vec<TrainedModel>) -> Result<EnsembleModel> {
        if members.len() != ENSEMBLE_SIZE {
            return Err(Error::invalid(format!("ensemble needs {ENSEMBLE_SIZE} members, got {}", members.len())));
        }
        members.sort_by_key(|m| m.space());
        for (m, space) in members.iter().zip(ColorSpaceId::ALL) {
            if m.space() != space {
                return Err(Error::invalid(format!("ensemble is missing the {space} member")));
            }
        }
        let family = members[0].family();
        if let Some(m) = members.iter().find(|m| m.family() != family) {
            return Err(Error::invalid(format!("mixed families: {family} and {}", m.family())));
        }
        Ok(EnsembleModel { family, members })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn members(&self) -> &[TrainedModel] {
        &self.members
    }

    pub fn member(&self, space: ColorSpaceId) -> &TrainedModel {
        &self.members[space.index()]
    }

    pub fn member_scores(&self, s: &StripSample) -> Result<[f64; ENSEMBLE_SIZE]> {
        let mut out = [0.0; ENSEMBLE_SIZE];
        for (o, m) in out.iter_mut().zip(&self.members) {
            *o = m.predict_score(&featurize(s, m.space())?)?;
        }
        Ok(out)
    }

    pub fn vote(&self, s: &StripSample) -> Result<u8> {
        Ok(count_votes(&self.member_scores(s)?))
    }

    pub fn votes(&self, ds: &Dataset) -> Result<Vec<u8>> {
        ds.samples().par_iter().map(|s| self.vote(s)).collect()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = EnsembleHeader {
            format: ENSEMBLE_FORMAT.into(),
            version: ENSEMBLE_FORMAT_VERSION,
            family: self.family,
            spaces: ColorSpaceId::ALL.to_vec(),
        };
        let line = serde_json::to_string(&header).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| Error::io("<ensemble stream>", e))?;
        for m in &self.members {
            m.write_to(&mut w)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<EnsembleModel> {
        let mut line = String::new();
        r.read_line(&mut line).map_err(|e| Error::Format(format!("ensemble header: {e}")))?;
        let header: EnsembleHeader =
            serde_json::from_str(line.trim_end()).map_err(|e| Error::Format(format!("ensemble header: {e}")))?;
        if header.format != ENSEMBLE_FORMAT || header.version != ENSEMBLE_FORMAT_VERSION {
            return Err(Error::Format(format!("not a version {ENSEMBLE_FORMAT_VERSION} ensemble file")));
        }
        let members = header
            .spaces
            .iter()
            .map(|_| TrainedModel::read_from(&mut r))
            .collect::<Result<Vec<_>>>()?;
        let e = EnsembleModel::from_members(members).map_err(|e| Error::Format(e.to_string()))?;
        if e.family != header.family {
            return Err(Error::Format("ensemble header family does not match its members".into()));
        }
        Ok(e)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        self.write_to(&mut out)?;
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<EnsembleModel> {
        Self::read_from(bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<EnsembleModel> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

/// One row of the abstention sweep. Rates are over answered samples only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: u8,
    pub answered: usize,
    pub total: usize,
    pub response_ratio: f64,
    pub accuracy: Metric,
    pub recall: Metric,
    pub specificity: Metric,
    /// Answered true negatives over every negative in the set.
    pub healthy_extracted: Metric,
    pub confusion: ConfusionMatrix,
}

pub fn sweep_row(votes: &[u8], labels: &[Label], k: u8, rule: AbstentionRule) -> Result<SweepRow> {
    if votes.len() != labels.len() {
        return Err(Error::invalid(format!("{} vote counts for {} labels", votes.len(), labels.len())));
    }
    if votes.is_empty() {
        return Err(Error::invalid("sweep needs at least one sample"));
    }
    let mut cm = ConfusionMatrix::default();
    for (&v, &y) in votes.iter().zip(labels) {
        if let Some(p) = abstaining_predict_with(v, k, rule)?.label() {
            cm.record(p, y);
        }
    }
    let answered = cm.total() as usize;
    let negatives = labels.iter().filter(|l| !l.is_positive()).count() as u64;
    let (accuracy, recall, specificity) = if answered == 0 {
        (Metric::Undefined, Metric::Undefined, Metric::Undefined)
    } else {
        let m = metric_set(&cm)?;
        (m.accuracy, m.sensitivity, m.specificity)
    };
    Ok(SweepRow {
        k,
        answered,
        total: votes.len(),
        response_ratio: answered as f64 / votes.len() as f64,
        accuracy,
        recall,
        specificity,
        healthy_extracted: Metric::ratio(cm.tn, negatives),
        confusion: cm,
    })
}

/// Rows for k = 6..=11.
pub fn sweep_from_votes(votes: &[u8], labels: &[Label], rule: AbstentionRule) -> Result<Vec<SweepRow>> {
    SWEEP_KS.map(|k| sweep_row(votes, labels, k, rule)).collect()
}

pub fn abstention_sweep(e: &EnsembleModel, test: &Dataset, rule: AbstentionRule) -> Result<Vec<SweepRow>> {
    test.require_non_empty("abstention sweep")?;
    sweep_from_votes(&e.votes(test)?, &test.labels(), rule)
}

pub const SWEEP_COLUMNS: [&str; 6] = ["k", "response_ratio", "accuracy", "recall", "specificity", "healthy_extracted"];

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = SWEEP_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k, r.response_ratio, r.accuracy, r.recall, r.specificity, r.healthy_extracted
        );
    }
    out
}

/// Six-decimal table in the layout of a printed sweep table.
pub fn sweep_to_text(rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{:>3} {:>14} {:>10} {:>10} {:>12} {:>10}\n",
        "k", "response ratio", "accuracy", "recall", "specificity", "healthy"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>3} {:>14.6} {:>10} {:>10} {:>12} {:>10}",
            r.k,
            r.response_ratio,
            format!("{:.6}", r.accuracy),
            format!("{:.6}", r.recall),
            format!("{:.6}", r.specificity),
            format!("{:.6}", r.healthy_extracted)
        );
    }
    out
}

pub fn triage_csv(ids: &[&str], votes: &[u8], k: u8, rule: AbstentionRule) -> Result<String> {
    if ids.len() != votes.len() {
        return Err(Error::invalid("ids and votes differ in length"));
    }
    let mut out = String::from("id,votes,decision\n");
    for (id, &v) in ids.iter().zip(votes) {
        let _ = writeln!(out, "{id},{v},{}", abstaining_predict_with(v, k, rule)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vote_counting() {
        assert_eq!(count_votes(&[0.9; 11]), 11);
        assert_eq!(count_votes(&[0.1; 11]), 0);
        let mut one = [0.1; 11];
        one[4] = 0.7;
        assert_eq!(count_votes(&one), 1);
        assert_eq!(count_votes(&[0.5; 11]), 0);
    }

    #[test]
    fn majority() {
        assert_eq!(majority_predict(6).unwrap(), Label::Positive);
        assert_eq!(majority_predict(5).unwrap(), Label::Negative);
        assert_eq!(majority_predict(11).unwrap(), Label::Positive);
        assert!(majority_predict(12).is_err());
    }

    #[test]
    fn band_endpoints() {
        assert_eq!(abstaining_predict(5, 8).unwrap(), Triage::InsufficientInformation);
        assert_eq!(abstaining_predict(0, 11).unwrap(), Triage::Negative);
        assert_eq!(abstaining_predict(11, 11).unwrap(), Triage::Positive);
        assert_eq!(abstaining_predict(5, 11).unwrap(), Triage::InsufficientInformation);
        assert_eq!(abstaining_predict(3, 8).unwrap(), Triage::Negative);
        assert!(abstaining_predict(3, 5).is_err());
        assert!(abstaining_predict(3, 12).is_err());
        assert_eq!(abstaining_predict_with(4, 10, AbstentionRule::Asymmetric).unwrap(), Triage::Negative);
        assert_eq!(abstaining_predict_with(7, 10, AbstentionRule::Asymmetric).unwrap(), Triage::InsufficientInformation);
    }

    #[test]
    fn scores() {
        assert_eq!(ensemble_score(0).unwrap(), 0.0);
        assert_eq!(ensemble_score(11).unwrap(), 1.0);
        assert_eq!(ensemble_score(6).unwrap(), 6.0 / 11.0);
    }

    #[test]
    fn degenerate_top_row() {
        // nothing reaches 11 votes, answered samples are all confident negatives
        let votes = [0, 0, 1, 5, 7, 9, 0];
        let labels = [Label::Negative, Label::Positive, Label::Negative, Label::Positive, Label::Positive, Label::Negative, Label::Negative];
        let r = sweep_row(&votes, &labels, 11, AbstentionRule::Symmetric).unwrap();
        assert_eq!(r.answered, 3);
        assert_eq!(r.recall, Metric::Defined(0.0));
        assert_eq!(r.specificity, Metric::Defined(1.0));
        let only_neg = sweep_row(&[0, 0, 6], &[Label::Negative, Label::Negative, Label::Positive], 11, AbstentionRule::Symmetric).unwrap();
        assert_eq!(only_neg.recall, Metric::Undefined);
        assert_eq!(only_neg.specificity, Metric::Defined(1.0));
    }

    #[test]
    fn sweep_csv_shape() {
        let rows = sweep_from_votes(&[0, 3, 6, 11], &[Label::Negative, Label::Negative, Label::Positive, Label::Positive], AbstentionRule::Symmetric).unwrap();
        let csv = sweep_to_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[0].starts_with("k,response_ratio,accuracy,recall,specificity"));
        assert!(lines[1].starts_with("6,1,"));
        let t = triage_csv(&["a", "b"], &[6, 2], 8, AbstentionRule::Symmetric).unwrap();
        assert_eq!(t, "id,votes,decision\na,6,insufficient_information\nb,2,negative\n");
    }

    proptest! {
        #[test]
        fn sweep_structure(votes in prop::collection::vec(0u8..=11, 1..200), signs in prop::collection::vec(any::<bool>(), 200)) {
            let labels: Vec<Label> = votes.iter().zip(&signs).map(|(_, &b)| Label::from_bool(b)).collect();
            let rows = sweep_from_votes(&votes, &labels, AbstentionRule::Symmetric).unwrap();
            prop_assert_eq!(rows[0].response_ratio, 1.0);
            for w in rows.windows(2) {
                prop_assert!(w[1].response_ratio <= w[0].response_ratio);
            }
            for &v in &votes {
                prop_assert_eq!(abstaining_predict(v, 6).unwrap().label(), Some(majority_predict(v).unwrap()));
                for k in 6..11u8 {
                    let next = abstaining_predict(v, k + 1).unwrap();
                    if next != Triage::InsufficientInformation {
                        prop_assert_eq!(abstaining_predict(v, k).unwrap(), next);
                    }
                }
            }
        }

        #[test]
        fn votes_ignore_member_order(mut s in prop::collection::vec(0.0f64..1.0, 11), rot in 0usize..11) {
            let v = count_votes(&s);
            s.rotate_left(rot);
            prop_assert_eq!(count_votes(&s), v);
        }
    }
}
