//! Save and reload single models and ensembles.

use stripscreen::color::{featurize, ColorSpaceId};
use stripscreen::ensemble::{train_ensemble, EnsembleModel};
use stripscreen::learners::{train, Family, ModelConfig, TrainedModel};
use stripscreen::synth::{generate, SynthConfig};

fn main() -> stripscreen::Result<()> {
    let ds = generate(&SynthConfig::preset("separable")?.with_n(300))?;
    let dir = tempfile::tempdir().expect("temp dir");

    let x = ds.samples().iter().map(|s| featurize(s, ColorSpaceId::Yuv)).collect::<stripscreen::Result<Vec<_>>>()?;
    let model = train(&x, &ds.labels(), &ModelConfig::new(Family::GradientBoosting, 4))?;
    let path = dir.path().join("gb_yuv.model");
    model.save(&path)?;
    let back = TrainedModel::load(&path)?;
    assert_eq!(back.predict_scores(&x)?, model.predict_scores(&x)?);
    let header = std::fs::read(&path).expect("read model");
    let first = header.split(|&b| b == b'\n').next().unwrap_or_default();
    println!("model header: {}", String::from_utf8_lossy(first));

    let e = train_ensemble(&ds, &ModelConfig::new(Family::Logreg, 0), 4)?;
    let epath = dir.path().join("ensemble.model");
    e.save(&epath)?;
    let e2 = EnsembleModel::load(&epath)?;
    assert_eq!(e2.votes(&ds)?, e.votes(&ds)?);
    println!("ensemble of {} reloaded, {} bytes", e2.members().len(), std::fs::metadata(&epath).expect("stat").len());
    Ok(())
}
