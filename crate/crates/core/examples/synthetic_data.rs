//! The shipped synthetic benchmarks and their Bayes accuracies.

use stripscreen::synth::{bayes_accuracy, generate_with_report, shuffle_labels, SynthConfig, PRESET_NAMES};

fn main() -> stripscreen::Result<()> {
    for name in PRESET_NAMES {
        let cfg = SynthConfig::preset(name)?;
        let generated = generate_with_report(&cfg)?;
        println!(
            "{name:<11} n={:<5} separation {:.3}  bayes {:.4}  clamped {:.3}%",
            cfg.n,
            cfg.separation()?,
            bayes_accuracy(&cfg)?,
            100.0 * generated.clamp_rate()
        );
    }

    // A correlated variant: one latent factor shared by every channel.
    let text = r#"
n = 500
positive_prior = 0.3
seed = 9
sigma = 15.0
mu0 = 120.0
mu1 = 126.0
latent_loading = 0.6
"#;
    let cfg = SynthConfig::from_toml_str(text)?;
    let ds = generate_with_report(&cfg)?.dataset;
    println!("custom: {} of {} positive", ds.positive_count(), ds.len());
    let shuffled = shuffle_labels(&ds, 1)?;
    println!("shuffled labels keep the count: {}", shuffled.positive_count());
    Ok(())
}
