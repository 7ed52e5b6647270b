//! Domain types for strip readings and the flat-file dataset around them.
//!
//! A [`StripSample`] is one client's record: demographics, three clinical
//! flags, the PCR ground truth, and the mean color of each of the 11 reagent
//! pads. Colors are stored as bytes; all color math happens later on reals
//! in `[0, 1]`.

mod csv_io;
mod patch;
mod split;
mod summary;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::SystemTime;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{csv_header, emit_csv, ingest_csv, ingest_reader, write_csv, Ingested, Rejection, RejectionReport, CSV_COLUMN_COUNT};
pub use patch::{mean_pad_color, read_ppm_patch, sample_pads_from_ppm, Patch};
pub use split::split;
pub use summary::{summarize, CenterSummary, FlagCounts, SummaryReport};

/// Number of reagent pads on the strip.
pub const PAD_COUNT: usize = 11;

/// The reagent pads, in the canonical order used for every feature layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PadId {
    Blood,
    Urobilinogen,
    Bilirubin,
    Protein,
    Nitrite,
    Ketone,
    AscorbicAcid,
    Glucose,
    PH,
    SpecificGravity,
    Leukocytes,
}

impl PadId {
    pub const ALL: [PadId; PAD_COUNT] = [
        PadId::Blood,
        PadId::Urobilinogen,
        PadId::Bilirubin,
        PadId::Protein,
        PadId::Nitrite,
        PadId::Ketone,
        PadId::AscorbicAcid,
        PadId::Glucose,
        PadId::PH,
        PadId::SpecificGravity,
        PadId::Leukocytes,
    ];

    /// Column token used in the CSV header (`Blood_R`, `AscorbicAcid_G`, ...).
    pub fn token(self) -> &'static str {
        match self {
            PadId::Blood => "Blood",
            PadId::Urobilinogen => "Urobilinogen",
            PadId::Bilirubin => "Bilirubin",
            PadId::Protein => "Protein",
            PadId::Nitrite => "Nitrite",
            PadId::Ketone => "Ketone",
            PadId::AscorbicAcid => "AscorbicAcid",
            PadId::Glucose => "Glucose",
            PadId::PH => "PH",
            PadId::SpecificGravity => "SpecificGravity",
            PadId::Leukocytes => "Leukocytes",
        }
    }

    /// Human-readable label as printed in result tables.
    pub fn display_name(self) -> &'static str {
        match self {
            PadId::AscorbicAcid => "Ascorbic Acid",
            PadId::SpecificGravity => "Specific Gravity",
            other => other.token(),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PadId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for PadId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PadId::ALL
            .into_iter()
            .find(|p| p.token().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown pad '{s}'")))
    }
}

/// One of the four collection centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Center {
    A,
    B,
    C,
    D,
}

impl Center {
    pub const ALL: [Center; 4] = [Center::A, Center::B, Center::C, Center::D];

    pub fn code(self) -> &'static str {
        match self {
            Center::A => "A",
            Center::B => "B",
            Center::C => "C",
            Center::D => "D",
        }
    }
}

impl FromStr for Center {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Center::A),
            "B" => Ok(Center::B),
            "C" => Ok(Center::C),
            "D" => Ok(Center::D),
            _ => Err(Error::data(format!("unknown center code '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    pub fn code(self) -> &'static str {
        match self {
            Gender::Male => "M",
            Gender::Female => "F",
        }
    }
}

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" => Ok(Gender::Male),
            "F" => Ok(Gender::Female),
            _ => Err(Error::data(format!("gender must be M or F, got '{s}'"))),
        }
    }
}

/// A clinical yes/no indicator that may be missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClinicalFlag {
    Positive,
    Negative,
    Unknown,
}

impl ClinicalFlag {
    pub fn code(self) -> &'static str {
        match self {
            ClinicalFlag::Positive => "1",
            ClinicalFlag::Negative => "0",
            ClinicalFlag::Unknown => "NA",
        }
    }

    /// 0/1 encoding, `None` when unknown.
    pub fn as_indicator(self) -> Option<f64> {
        match self {
            ClinicalFlag::Positive => Some(1.0),
            ClinicalFlag::Negative => Some(0.0),
            ClinicalFlag::Unknown => None,
        }
    }
}

impl FromStr for ClinicalFlag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(ClinicalFlag::Positive),
            "0" => Ok(ClinicalFlag::Negative),
            "NA" => Ok(ClinicalFlag::Unknown),
            _ => Err(Error::data(format!("clinical flag must be 1, 0 or NA, got '{s}'"))),
        }
    }
}

/// PCR outcome; `Positive` is COVID-positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Label::Positive => "1",
            Label::Negative => "0",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Label::Positive),
            "0" => Ok(Label::Negative),
            _ => Err(Error::data(format!("pcr_label must be 1 or 0, got '{s}'"))),
        }
    }
}

/// An 8-bit RGB reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Rgb8 {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb8 {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb8 { r, g, b }
    }

    /// Channels scaled to `[0, 1]`.
    pub fn to_unit(self) -> [f64; 3] {
        [self.r as f64 / 255.0, self.g as f64 / 255.0, self.b as f64 / 255.0]
    }

    pub fn channels(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }
}

/// One client's record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripSample {
    pub id: String,
    pub center: Center,
    pub age: u32,
    pub gender: Gender,
    pub diabetes: ClinicalFlag,
    pub blood_pressure: ClinicalFlag,
    pub smoking: ClinicalFlag,
    pub pcr_label: Label,
    /// Mean pad colors, indexed by [`PadId::index`].
    pub pads: [Rgb8; PAD_COUNT],
}

impl StripSample {
    pub fn pad(&self, pad: PadId) -> Rgb8 {
        self.pads[pad.index()]
    }
}

/// Where a dataset came from. Never serialized into reports, so reruns stay
/// byte-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub source: PathBuf,
    pub ingested_at: SystemTime,
}

impl Provenance {
    pub fn in_memory(name: &str) -> Self {
        Provenance {
            source: PathBuf::from(name),
            ingested_at: SystemTime::now(),
        }
    }
}

/// An ordered, immutable collection of samples.
#[derive(Debug, Clone)]
pub struct Dataset {
    samples: Vec<StripSample>,
    provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset, checking id uniqueness.
    pub fn new(samples: Vec<StripSample>, provenance: Provenance) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(samples.len());
        for s in &samples {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::data(format!("duplicate id '{}'", s.id)));
            }
        }
        Ok(Dataset { samples, provenance })
    }

    pub fn from_samples(samples: Vec<StripSample>) -> Result<Self> {
        Dataset::new(samples, Provenance::in_memory("<memory>"))
    }

    pub fn samples(&self) -> &[StripSample] {
        &self.samples
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.samples.iter().map(|s| s.pcr_label).collect()
    }

    pub fn positive_count(&self) -> usize {
        self.samples.iter().filter(|s| s.pcr_label.is_positive()).count()
    }

    pub(crate) fn require_non_empty(&self, what: &str) -> Result<()> {
        if self.samples.is_empty() {
            Err(Error::degenerate(format!("{what}: dataset is empty")))
        } else {
            Ok(())
        }
    }

    /// Subset by indices into this dataset, preserving the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Same samples with labels replaced; used by the null-model controls.
    pub fn with_labels(&self, labels: &[Label]) -> Result<Dataset> {
        if labels.len() != self.samples.len() {
            return Err(Error::invalid("label count does not match sample count"));
        }
        let samples = self
            .samples
            .iter()
            .zip(labels)
            .map(|(s, &l)| StripSample {
                pcr_label: l,
                ..s.clone()
            })
            .collect();
        Ok(Dataset {
            samples,
            provenance: self.provenance.clone(),
        })
    }
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.samples == other.samples
    }
}
