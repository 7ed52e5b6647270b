use std::fmt::Write as _;

use serde::Serialize;

use crate::data::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    /// `(false positive rate, true positive rate)`, from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// ROC over every distinct score, highest first. Tied scores move together,
/// so a block of ties contributes one diagonal segment.
pub fn roc_curve(scores: &[f64], labels: &[Label]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::invalid(format!("{} scores for {} labels", scores.len(), labels.len())));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("scores must be finite"));
    }
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::degenerate("ROC needs both classes"));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let (p, n) = (pos as f64, neg as f64);
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (tp0, fp0) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        // trapezoid in count units, normalized once at the end
        auc += (fp - fp0) as f64 * (tp + tp0) as f64 / 2.0;
        points.push((fp as f64 / n, tp as f64 / p));
    }
    Ok(RocCurve {
        points,
        auc: auc / (p * n),
    })
}

impl RocCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for (x, y) in &self.points {
            let _ = writeln!(out, "{x},{y}");
        }
        out
    }

    /// Standalone SVG: the curve as a polyline plus the y = x reference line.
    pub fn to_svg(&self, title: &str) -> String {
        let (size, pad) = (400.0, 40.0);
        let plot = size - 2.0 * pad;
        let px = |x: f64| pad + x * plot;
        let py = |y: f64| size - pad - y * plot;
        let mut poly = String::new();
        for (i, (x, y)) in self.points.iter().enumerate() {
            if i > 0 {
                poly.push(' ');
            }
            let _ = write!(poly, "{:.3},{:.3}", px(*x), py(*y));
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        );
        let _ = writeln!(out, r#"  <rect x="0" y="0" width="{size}" height="{size}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"  <rect x="{pad}" y="{pad}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r##"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#888" stroke-dasharray="4 4"/>"##,
            px(0.0),
            py(0.0),
            px(1.0),
            py(1.0)
        );
        let _ = writeln!(out, r##"  <polyline fill="none" stroke="#c0392b" stroke-width="2" points="{poly}"/>"##);
        let _ = writeln!(
            out,
            r#"  <text x="{}" y="{}" font-size="14" text-anchor="middle">{} (AUC = {:.4})</text>"#,
            size / 2.0,
            pad / 2.0 + 5.0,
            escape(title),
            self.auc
        );
        let _ = writeln!(
            out,
            r#"  <text x="{}" y="{}" font-size="12" text-anchor="middle">False positive rate</text>"#,
            size / 2.0,
            size - 10.0
        );
        let _ = writeln!(
            out,
            r#"  <text x="12" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 12 {})">True positive rate</text>"#,
            size / 2.0,
            size / 2.0
        );
        out.push_str("</svg>\n");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: Label = Label::Positive;
    const N: Label = Label::Negative;

    /// Mann-Whitney U / (P N), ties count one half. O(n^2) on purpose.
    fn mann_whitney(scores: &[f64], labels: &[Label]) -> f64 {
        let (mut u, mut pairs) = (0.0, 0.0);
        for (i, li) in labels.iter().enumerate() {
            if !li.is_positive() {
                continue;
            }
            for (j, lj) in labels.iter().enumerate() {
                if lj.is_positive() {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    u += 1.0;
                } else if scores[i] == scores[j] {
                    u += 0.5;
                }
            }
        }
        u / pairs
    }

    #[test]
    fn perfect_separation() {
        let r = roc_curve(&[0.9, 0.8, 0.2, 0.1], &[P, P, N, N]).unwrap();
        assert_eq!(r.auc, 1.0);
        assert_eq!(r.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.points.last(), Some(&(1.0, 1.0)));
    }

    #[test]
    fn all_ties_is_diagonal() {
        let r = roc_curve(&[0.3; 6], &[P, N, N, P, N, N]).unwrap();
        assert_eq!(r.auc, 0.5);
        assert_eq!(r.points, vec![(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn interleaved_order_still_separates() {
        let r = roc_curve(&[0.9, 0.4, 0.6, 0.1], &[P, N, P, N]).unwrap();
        assert_eq!(r.auc, 1.0);
    }

    #[test]
    fn errors() {
        assert!(roc_curve(&[0.1, 0.2], &[P, P]).is_err());
        assert!(roc_curve(&[0.1, f64::NAN], &[P, N]).is_err());
        assert!(roc_curve(&[0.1], &[P, N]).is_err());
    }

    #[test]
    fn svg_has_curve_and_reference_line() {
        let r = roc_curve(&[0.9, 0.4, 0.6, 0.1], &[P, N, N, P]).unwrap();
        let svg = r.to_svg("mlp <rgb>");
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("mlp &lt;rgb&gt;"));
        assert_eq!(r.to_csv().lines().count(), r.points.len() + 1);
    }

    fn scored() -> impl Strategy<Value = (Vec<f64>, Vec<Label>)> {
        prop::collection::vec((0u8..12, any::<bool>()), 2..80).prop_map(|v| {
            // coarse scores so ties are common
            let scores = v.iter().map(|(s, _)| *s as f64 / 11.0).collect();
            let labels = v.iter().map(|(_, l)| Label::from_bool(*l)).collect();
            (scores, labels)
        })
    }

    proptest! {
        #[test]
        fn matches_mann_whitney_and_complements((scores, labels) in scored()) {
            let r = roc_curve(&scores, &labels);
            prop_assume!(r.is_ok());
            let r = r.unwrap();
            prop_assert!((r.auc - mann_whitney(&scores, &labels)).abs() <= 1e-12);
            let flipped: Vec<Label> = labels.iter().map(|l| l.flipped()).collect();
            let f = roc_curve(&scores, &flipped).unwrap();
            prop_assert!((r.auc + f.auc - 1.0).abs() <= 1e-12);
            for w in r.points.windows(2) {
                prop_assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
            }
            prop_assert!((0.0..=1.0).contains(&r.auc));
            // strictly increasing transform
            let warped: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
            prop_assert_eq!(roc_curve(&warped, &labels).unwrap().auc, r.auc);
        }
    }
}
