use std::fmt::Write as _;

use serde::Serialize;

use super::{Center, ClinicalFlag, Dataset, Gender};
use crate::error::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FlagCounts {
    pub positive: usize,
    pub negative: usize,
    pub unknown: usize,
}

impl FlagCounts {
    fn add(&mut self, flag: ClinicalFlag) {
        match flag {
            ClinicalFlag::Positive => self.positive += 1,
            ClinicalFlag::Negative => self.negative += 1,
            ClinicalFlag::Unknown => self.unknown += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterSummary {
    pub center: Center,
    pub male: usize,
    pub female: usize,
    pub diabetes: FlagCounts,
    pub blood_pressure: FlagCounts,
    pub smoking: FlagCounts,
}

/// Dataset-level counts: overall statistics, gender by center, and the
/// clinical indicators by center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub n_samples: usize,
    /// Full precision; rounded only when rendered.
    pub mean_age: f64,
    /// (male, female)
    pub gender_counts: (usize, usize),
    /// (healthy, sick)
    pub label_counts: (usize, usize),
    /// One entry per center code, A through D, including empty centers.
    pub per_center: Vec<CenterSummary>,
}

pub fn summarize(ds: &Dataset) -> Result<SummaryReport> {
    ds.require_non_empty("summarize")?;
    let mut per_center: Vec<CenterSummary> = Center::ALL
        .iter()
        .map(|&center| CenterSummary {
            center,
            male: 0,
            female: 0,
            diabetes: FlagCounts::default(),
            blood_pressure: FlagCounts::default(),
            smoking: FlagCounts::default(),
        })
        .collect();
    let (mut male, mut female, mut sick) = (0usize, 0usize, 0usize);
    let mut age_sum = 0u64;
    for s in ds.samples() {
        age_sum += s.age as u64;
        let c = &mut per_center[s.center as usize];
        match s.gender {
            Gender::Male => {
                male += 1;
                c.male += 1;
            }
            Gender::Female => {
                female += 1;
                c.female += 1;
            }
        }
        c.diabetes.add(s.diabetes);
        c.blood_pressure.add(s.blood_pressure);
        c.smoking.add(s.smoking);
        if s.pcr_label.is_positive() {
            sick += 1;
        }
    }
    let n = ds.len();
    Ok(SummaryReport {
        n_samples: n,
        mean_age: age_sum as f64 / n as f64,
        gender_counts: (male, female),
        label_counts: (n - sick, sick),
        per_center,
    })
}

impl SummaryReport {
    /// Three plain-text tables: dataset statistics, gender by center, and
    /// clinical indicators by center.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Statistics of collected data set");
        let _ = writeln!(out, "{:<40} {}", "Statistics", "Value");
        let _ = writeln!(out, "{:<40} {}", "Number of Samples", self.n_samples);
        let _ = writeln!(out, "{:<40} {:.2}", "Average of age", self.mean_age);
        let _ = writeln!(
            out,
            "{:<40} Male: {} - Female: {}",
            "Gender distribution", self.gender_counts.0, self.gender_counts.1
        );
        let _ = writeln!(
            out,
            "{:<40} Healthy: {} - Sick: {}",
            "Distribution of healthy and sick people", self.label_counts.0, self.label_counts.1
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "Gender of clients by center");
        let _ = writeln!(out, "{:<12} {:>8} {:>8}", "Data Center", "Male", "Female");
        for c in &self.per_center {
            let _ = writeln!(out, "{:<12} {:>8} {:>8}", c.center.code(), c.male, c.female);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Clinical information by center");
        let _ = writeln!(
            out,
            "{:<12} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "", "Diabetes", "", "Blood pres", "", "Smoking", ""
        );
        let _ = writeln!(
            out,
            "{:<12} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "Data center", "Positive", "Negative", "Positive", "Negative", "Positive", "Negative"
        );
        for c in &self.per_center {
            let _ = writeln!(
                out,
                "{:<12} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
                c.center.code(),
                c.diabetes.positive,
                c.diabetes.negative,
                c.blood_pressure.positive,
                c.blood_pressure.negative,
                c.smoking.positive,
                c.smoking.negative
            );
        }
        out
    }

    pub fn statistics_csv(&self) -> String {
        format!(
            "statistic,value\nnumber_of_samples,{}\naverage_age,{}\nmale,{}\nfemale,{}\nhealthy,{}\nsick,{}\n",
            self.n_samples,
            self.mean_age,
            self.gender_counts.0,
            self.gender_counts.1,
            self.label_counts.0,
            self.label_counts.1
        )
    }

    pub fn gender_csv(&self) -> String {
        let mut out = String::from("center,male,female\n");
        for c in &self.per_center {
            let _ = writeln!(out, "{},{},{}", c.center.code(), c.male, c.female);
        }
        out
    }

    pub fn clinical_csv(&self) -> String {
        let mut out = String::from(
            "center,diabetes_positive,diabetes_negative,diabetes_unknown,\
             blood_pressure_positive,blood_pressure_negative,blood_pressure_unknown,\
             smoking_positive,smoking_negative,smoking_unknown\n",
        );
        for c in &self.per_center {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.center.code(),
                c.diabetes.positive,
                c.diabetes.negative,
                c.diabetes.unknown,
                c.blood_pressure.positive,
                c.blood_pressure.negative,
                c.blood_pressure.unknown,
                c.smoking.positive,
                c.smoking.negative,
                c.smoking.unknown
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Label, Rgb8, StripSample, PAD_COUNT};

    fn sample(id: &str, center: Center, age: u32, gender: Gender, label: Label, smoking: ClinicalFlag) -> StripSample {
        StripSample {
            id: id.into(),
            center,
            age,
            gender,
            diabetes: ClinicalFlag::Negative,
            blood_pressure: ClinicalFlag::Unknown,
            smoking,
            pcr_label: label,
            pads: [Rgb8::default(); PAD_COUNT],
        }
    }

    #[test]
    fn single_sample() {
        let ds = Dataset::from_samples(vec![sample("x", Center::A, 40, Gender::Male, Label::Negative, ClinicalFlag::Negative)]).unwrap();
        let r = summarize(&ds).unwrap();
        assert_eq!(r.n_samples, 1);
        assert_eq!(r.mean_age, 40.0);
        assert_eq!(r.gender_counts, (1, 0));
        assert_eq!(r.label_counts, (1, 0));
        assert_eq!(r.per_center.len(), 4);
        assert_eq!(r.per_center[0].blood_pressure.unknown, 1);
    }

    #[test]
    fn counts_by_center_and_permutation_invariance() {
        let mut v = vec![
            sample("a", Center::B, 20, Gender::Male, Label::Positive, ClinicalFlag::Positive),
            sample("b", Center::B, 31, Gender::Female, Label::Negative, ClinicalFlag::Negative),
            sample("c", Center::D, 50, Gender::Male, Label::Positive, ClinicalFlag::Unknown),
        ];
        let r1 = summarize(&Dataset::from_samples(v.clone()).unwrap()).unwrap();
        v.reverse();
        let r2 = summarize(&Dataset::from_samples(v).unwrap()).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.label_counts, (1, 2));
        let b = &r1.per_center[1];
        assert_eq!((b.male, b.female, b.smoking.positive, b.smoking.negative), (1, 1, 1, 1));
        assert_eq!(r1.per_center[3].smoking.unknown, 1);
        assert!((r1.mean_age - 101.0 / 3.0).abs() < 1e-12);
        assert!(r1.to_text().contains("Average of age"));
        assert!(r1.to_text().contains("33.67"));
    }

    #[test]
    fn empty_dataset_errors() {
        assert!(summarize(&Dataset::from_samples(vec![]).unwrap()).is_err());
    }
}
