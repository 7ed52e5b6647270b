//! Group-difference tests and correlation analysis.

mod correlation;
mod special;
mod ttest;

use std::fmt::Write as _;

use serde::Serialize;

use crate::color::{featurize, ColorSpaceId};
use crate::data::{Dataset, PadId, PAD_COUNT};
use crate::error::{Error, Result};

pub use correlation::{correlation_matrix, pearson, CorrelationMatrix, Variable};
pub use special::{ln_beta, ln_gamma, regularized_incomplete_beta, t_sf_two_tailed};
pub use ttest::{t_test, welch_t_test, TTestResult, TTestVariant};

/// 11 x 3 grid of tests between the healthy and the sick group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PValueTable {
    pub space: ColorSpaceId,
    pub variant: TTestVariant,
    /// Channel indices in column order. For rgb this is Blue, Green, Red.
    pub channel_order: [usize; 3],
    pub column_names: [String; 3],
    /// `cells[pad][column]`.
    pub cells: Vec<[TTestResult; 3]>,
}

impl PValueTable {
    pub fn p_value(&self, pad: PadId, column: usize) -> f64 {
        self.cells[pad.index()][column].p_value
    }

    /// Column position of a channel index within this table.
    pub fn column_of(&self, channel: usize) -> usize {
        self.channel_order.iter().position(|&c| c == channel).expect("channel in 0..3")
    }

    pub fn p_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.cells.iter().flat_map(|row| row.iter().map(|c| c.p_value))
    }

    /// Full-precision CSV with t, df and p for every cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter");
        for name in &self.column_names {
            let _ = write!(out, ",{name}_p,{name}_t,{name}_df");
        }
        out.push('\n');
        for (pad, row) in PadId::ALL.iter().zip(&self.cells) {
            out.push_str(pad.token());
            for c in row {
                let _ = write!(out, ",{},{},{}", c.p_value, c.t_statistic, c.degrees_of_freedom);
            }
            out.push('\n');
        }
        out
    }

    /// Five-decimal rendering laid out like a printed results table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<18} {:>10} {:>10} {:>10}",
            "Channel/Parameter", self.column_names[0], self.column_names[1], self.column_names[2]
        );
        for (pad, row) in PadId::ALL.iter().zip(&self.cells) {
            let _ = writeln!(
                out,
                "{:<18} {:>10.5} {:>10.5} {:>10.5}",
                pad.display_name(),
                row[0].p_value,
                row[1].p_value,
                row[2].p_value
            );
        }
        out
    }

    pub fn to_plot_data(&self) -> String {
        let mut out = String::from("x,y,value\n");
        for (pad, row) in PadId::ALL.iter().zip(&self.cells) {
            for (name, c) in self.column_names.iter().zip(row) {
                let _ = writeln!(out, "{name},{},{}", pad.token(), c.p_value);
            }
        }
        out
    }
}

/// One t-test per (pad, channel) between negative and positive samples in
/// the given space.
pub fn group_difference_table(ds: &Dataset, space: ColorSpaceId, variant: TTestVariant) -> Result<PValueTable> {
    let mut healthy: Vec<Vec<f64>> = Vec::new();
    let mut sick: Vec<Vec<f64>> = Vec::new();
    for s in ds.samples() {
        let v = featurize(s, space)?.values;
        if s.pcr_label.is_positive() {
            sick.push(v);
        } else {
            healthy.push(v);
        }
    }
    if healthy.len() < 2 || sick.len() < 2 {
        return Err(Error::degenerate(format!(
            "each group needs at least 2 samples (healthy {}, sick {})",
            healthy.len(),
            sick.len()
        )));
    }
    let channel_order = if space == ColorSpaceId::Rgb { [2, 1, 0] } else { [0, 1, 2] };
    let names = space.channel_names();
    let column_names = if space == ColorSpaceId::Rgb {
        ["Blue".to_string(), "Green".to_string(), "Red".to_string()]
    } else {
        channel_order.map(|c| names[c].to_string())
    };

    let mut cells = Vec::with_capacity(PAD_COUNT);
    for pad in PadId::ALL {
        let mut row = [TTestResult {
            t_statistic: 0.0,
            degrees_of_freedom: 0.0,
            p_value: 1.0,
        }; 3];
        for (col, &ch) in channel_order.iter().enumerate() {
            let idx = 3 * pad.index() + ch;
            let a: Vec<f64> = healthy.iter().map(|v| v[idx]).collect();
            let b: Vec<f64> = sick.iter().map(|v| v[idx]).collect();
            row[col] = t_test(&a, &b, variant).map_err(|e| {
                Error::degenerate(format!("{} / {}: {e}", pad.token(), column_names[col]))
            })?;
        }
        cells.push(row);
    }
    Ok(PValueTable {
        space,
        variant,
        channel_order,
        column_names,
        cells,
    })
}
