use std::fmt::Write as _;

use serde::Serialize;

use crate::color::{convert, ColorSpaceId};
use crate::data::{Dataset, Gender, PadId, StripSample};
use crate::error::{Error, Result};

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::degenerate("correlation needs at least 2 pairs"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::degenerate("correlation input has zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// A column that can enter a correlation matrix. Binary fields are encoded
/// 0/1 (male = 1, positive = 1), which makes correlations against the PCR
/// label point-biserial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Channel { space: ColorSpaceId, pad: PadId, channel: usize },
    Gender,
    Age,
    Diabetes,
    BloodPressure,
    Smoking,
    Pcr,
}

impl Variable {
    pub fn name(&self) -> String {
        match self {
            Variable::Channel { space, pad, channel } => {
                let ch = space.channel_names()[*channel];
                if *space == ColorSpaceId::Rgb {
                    format!("{}_{}", pad.token(), ch)
                } else {
                    format!("{}_{}_{}", pad.token(), space, ch)
                }
            }
            Variable::Gender => "gender".into(),
            Variable::Age => "age".into(),
            Variable::Diabetes => "diabetes".into(),
            Variable::BloodPressure => "blood_pressure".into(),
            Variable::Smoking => "smoking".into(),
            Variable::Pcr => "pcr".into(),
        }
    }

    fn value(&self, s: &StripSample) -> Result<Option<f64>> {
        Ok(match self {
            Variable::Channel { space, pad, channel } => Some(convert(&s.pad(*pad).to_unit(), *space)?[*channel]),
            Variable::Gender => Some(if s.gender == Gender::Male { 1.0 } else { 0.0 }),
            Variable::Age => Some(s.age as f64),
            Variable::Diabetes => s.diabetes.as_indicator(),
            Variable::BloodPressure => s.blood_pressure.as_indicator(),
            Variable::Smoking => s.smoking.as_indicator(),
            Variable::Pcr => Some(if s.pcr_label.is_positive() { 1.0 } else { 0.0 }),
        })
    }

    /// All 33 channels of one space followed by the PCR label.
    pub fn urine_block(space: ColorSpaceId) -> Vec<Variable> {
        let mut v: Vec<Variable> = PadId::ALL
            .iter()
            .flat_map(|&pad| (0..3).map(move |channel| Variable::Channel { space, pad, channel }))
            .collect();
        v.push(Variable::Pcr);
        v
    }

    /// Demographic and clinical fields followed by the PCR label.
    pub fn clinical_block() -> Vec<Variable> {
        vec![
            Variable::Gender,
            Variable::Age,
            Variable::Diabetes,
            Variable::BloodPressure,
            Variable::Smoking,
            Variable::Pcr,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// Row-major, `names.len()` squared.
    pub values: Vec<Vec<f64>>,
    /// Number of complete pairs behind each cell.
    pub pair_counts: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("variable");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (n, row) in self.names.iter().zip(&self.values) {
            out.push_str(n);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// `x,y,value` triples for heatmap renderers.
    pub fn to_plot_data(&self) -> String {
        let mut out = String::from("x,y,value\n");
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{},{},{v}", self.names[j], self.names[i]);
            }
        }
        out
    }
}

/// Pearson matrix over `variables`. Samples with an unknown clinical value
/// are dropped pairwise, only from the cells that involve that variable.
pub fn correlation_matrix(ds: &Dataset, variables: &[Variable]) -> Result<CorrelationMatrix> {
    ds.require_non_empty("correlation_matrix")?;
    let columns: Vec<Vec<Option<f64>>> = variables
        .iter()
        .map(|v| ds.samples().iter().map(|s| v.value(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    for (v, col) in variables.iter().zip(&columns) {
        let known: Vec<f64> = col.iter().flatten().copied().collect();
        let first = known.first().copied();
        if known.len() < 2 || known.iter().all(|&x| Some(x) == first) {
            return Err(Error::degenerate(format!("variable '{}' has zero variance", v.name())));
        }
    }

    let k = variables.len();
    let mut values = vec![vec![0.0; k]; k];
    let mut pair_counts = vec![vec![0usize; k]; k];
    for i in 0..k {
        values[i][i] = 1.0;
        pair_counts[i][i] = columns[i].iter().flatten().count();
        for j in (i + 1)..k {
            let (xs, ys): (Vec<f64>, Vec<f64>) = columns[i]
                .iter()
                .zip(&columns[j])
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .unzip();
            let r = pearson(&xs, &ys).map_err(|_| {
                Error::degenerate(format!(
                    "no variance in the complete pairs of '{}' and '{}'",
                    variables[i].name(),
                    variables[j].name()
                ))
            })?;
            values[i][j] = r;
            values[j][i] = r;
            pair_counts[i][j] = xs.len();
            pair_counts[j][i] = xs.len();
        }
    }
    Ok(CorrelationMatrix {
        names: variables.iter().map(Variable::name).collect(),
        values,
        pair_counts,
    })
}
