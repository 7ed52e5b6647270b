//! Heatmaps rendered as standalone SVG. Coordinates are printed with fixed
//! precision so output is byte-stable.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::escape;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColorScale {
    /// White at `lo`, dark blue at `hi`.
    Sequential { lo: f64, hi: f64 },
    /// Blue at -1, white at 0, red at +1.
    Diverging,
}

impl ColorScale {
    fn color(self, v: f64) -> (u8, u8, u8) {
        if !v.is_finite() {
            return (200, 200, 200);
        }
        let lerp = |a: f64, b: f64, t: f64| (a + (b - a) * t).round().clamp(0.0, 255.0) as u8;
        match self {
            ColorScale::Sequential { lo, hi } => {
                let t = if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
                (lerp(255.0, 8.0, t), lerp(255.0, 48.0, t), lerp(255.0, 107.0, t))
            }
            ColorScale::Diverging => {
                let t = v.clamp(-1.0, 1.0);
                if t < 0.0 {
                    (lerp(255.0, 33.0, -t), lerp(255.0, 102.0, -t), lerp(255.0, 172.0, -t))
                } else {
                    (lerp(255.0, 178.0, t), lerp(255.0, 24.0, t), lerp(255.0, 43.0, t))
                }
            }
        }
    }
}

/// `values[row][col]`, rows labeled by `y_labels` top to bottom.
pub fn heatmap_svg(title: &str, x_labels: &[String], y_labels: &[String], values: &[Vec<f64>], scale: ColorScale) -> Result<String> {
    if values.len() != y_labels.len() || values.iter().any(|r| r.len() != x_labels.len()) {
        return Err(Error::invalid("heatmap values do not match the label counts"));
    }
    let cell = if x_labels.len() > 20 { 14.0 } else { 32.0 };
    let (left, top) = (130.0, 130.0);
    let width = left + cell * x_labels.len() as f64 + 20.0;
    let height = top + cell * y_labels.len() as f64 + 20.0;
    let font = if cell < 20.0 { 8 } else { 11 };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r#"  <rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(out, r#"  <text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#, width / 2.0, escape(title));
    for (j, name) in x_labels.iter().enumerate() {
        let x = left + cell * (j as f64 + 0.5);
        let y = top - 6.0;
        let _ = writeln!(
            out,
            r#"  <text x="{x:.1}" y="{y:.1}" font-size="{font}" transform="rotate(-60 {x:.1} {y:.1})">{}</text>"#,
            escape(name)
        );
    }
    for (i, (name, row)) in y_labels.iter().zip(values).enumerate() {
        let y = top + cell * i as f64;
        let _ = writeln!(
            out,
            r#"  <text x="{:.1}" y="{:.1}" font-size="{font}" text-anchor="end">{}</text>"#,
            left - 6.0,
            y + cell * 0.65,
            escape(name)
        );
        for (j, v) in row.iter().enumerate() {
            let (r, g, b) = scale.color(*v);
            let _ = writeln!(
                out,
                r##"  <rect x="{:.1}" y="{y:.1}" width="{cell}" height="{cell}" fill="#{r:02x}{g:02x}{b:02x}"><title>{} / {}: {v}</title></rect>"##,
                left + cell * j as f64,
                escape(name),
                escape(&x_labels[j])
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_is_checked() {
        let xs = vec!["a".to_string(), "b".to_string()];
        let ys = vec!["r".to_string()];
        assert!(heatmap_svg("t", &xs, &ys, &[vec![0.0]], ColorScale::Diverging).is_err());
        let svg = heatmap_svg("t", &xs, &ys, &[vec![-1.0, 1.0]], ColorScale::Diverging).unwrap();
        assert!(svg.contains("#2166ac") && svg.contains("#b2182b"));
        assert_eq!(svg.matches("<rect").count(), 3);
    }

    #[test]
    fn sequential_ends() {
        let s = ColorScale::Sequential { lo: 0.0, hi: 1.0 };
        assert_eq!(s.color(0.0), (255, 255, 255));
        assert_eq!(s.color(2.0), (8, 48, 107));
        assert_eq!(s.color(f64::NAN), (200, 200, 200));
    }
}
