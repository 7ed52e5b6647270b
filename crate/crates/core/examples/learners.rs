//! Fit each learner family on one space and score a held-out split.

use stripscreen::color::{featurize, ColorSpaceId};
use stripscreen::data::split;
use stripscreen::learners::{train, Family, ModelConfig};
use stripscreen::metrics::{confusion, metric_set, threshold_scores, DEFAULT_THRESHOLD};
use stripscreen::synth::{bayes_accuracy, generate, SynthConfig};

fn main() -> stripscreen::Result<()> {
    let cfg = SynthConfig::preset("paper-like")?;
    let ds = generate(&cfg)?;
    let (train_set, test_set) = split(&ds, 0.2, 1, true)?;
    let space = ColorSpaceId::Lab;
    let x_train = train_set.samples().iter().map(|s| featurize(s, space)).collect::<stripscreen::Result<Vec<_>>>()?;
    let x_test = test_set.samples().iter().map(|s| featurize(s, space)).collect::<stripscreen::Result<Vec<_>>>()?;

    println!("bayes accuracy {:.3}", bayes_accuracy(&cfg)?);
    println!("{:<22} {:>9} {:>9} {:>11} {:>9}", "model", "precision", "recall", "specificity", "accuracy");
    for family in Family::ALL {
        let model = train(&x_train, &train_set.labels(), &ModelConfig::new(family, 7))?;
        let pred = threshold_scores(&model.predict_scores(&x_test)?, DEFAULT_THRESHOLD);
        let m = metric_set(&confusion(&pred, &test_set.labels())?)?;
        let [p, r, s, a] = m.in_report_order().map(|v| v.value().unwrap_or(f64::NAN));
        println!("{:<22} {p:>9.3} {r:>9.3} {s:>11.3} {a:>9.3}", family.display_name());
    }

    // Hyperparameters can come from a TOML file.
    let custom = ModelConfig::from_toml_str("family = \"random_forest\"\nseed = 3\nn_trees = 25\nmax_depth = 6\n")?;
    let model = train(&x_train, &train_set.labels(), &custom)?;
    println!("25 shallow trees, test score of first sample {:.3}", model.predict_score(&x_test[0])?);
    Ok(())
}
