//! ROC of one member and of the ensemble vote fraction, written as CSV and SVG.
//!
//!     cargo run --example roc -- out_dir

use stripscreen::color::{featurize, ColorSpaceId};
use stripscreen::data::split;
use stripscreen::ensemble::{ensemble_score, train_ensemble};
use stripscreen::learners::{Family, ModelConfig};
use stripscreen::metrics::roc_curve;
use stripscreen::synth::{generate, SynthConfig};

fn main() -> stripscreen::Result<()> {
    let out = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "roc_out".into()));
    std::fs::create_dir_all(&out).expect("create output dir");
    let ds = generate(&SynthConfig::preset("paper-like")?.with_n(1000))?;
    let (train_set, test_set) = split(&ds, 0.3, 2, true)?;
    let e = train_ensemble(&train_set, &ModelConfig::new(Family::Logreg, 0), 2)?;
    let labels = test_set.labels();

    let member = e.member(ColorSpaceId::Rgb);
    let x = test_set.samples().iter().map(|s| featurize(s, ColorSpaceId::Rgb)).collect::<stripscreen::Result<Vec<_>>>()?;
    let single = roc_curve(&member.predict_scores(&x)?, &labels)?;

    let fractions = e.votes(&test_set)?.into_iter().map(ensemble_score).collect::<stripscreen::Result<Vec<_>>>()?;
    let voted = roc_curve(&fractions, &labels)?;

    for (name, curve, title) in [("rgb_member", &single, "RGB member probability"), ("ensemble", &voted, "Ensemble vote fraction")] {
        std::fs::write(out.join(format!("{name}.csv")), curve.to_csv()).expect("write csv");
        std::fs::write(out.join(format!("{name}.svg")), curve.to_svg(title)).expect("write svg");
        println!("{title}: AUC {:.4}, {} points", curve.auc, curve.points.len());
    }
    println!("wrote {}", out.display());
    Ok(())
}
