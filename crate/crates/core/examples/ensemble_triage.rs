//! Train the 11-member ensemble, then triage samples with abstention.

use stripscreen::data::split;
use stripscreen::ensemble::{abstaining_predict_with, abstention_sweep, sweep_to_text, train_ensemble, AbstentionRule, Triage};
use stripscreen::learners::{Family, ModelConfig};
use stripscreen::synth::{generate, SynthConfig};

fn main() -> stripscreen::Result<()> {
    let ds = generate(&SynthConfig::preset("paper-like")?)?;
    let (train_set, test_set) = split(&ds, 0.1, 8, true)?;
    let ensemble = train_ensemble(&train_set, &ModelConfig::new(Family::Mlp, 0), 8)?;

    let votes = ensemble.votes(&test_set)?;
    for k in [6, 10] {
        let mut counts = [0usize; 3];
        for &v in &votes {
            match abstaining_predict_with(v, k, AbstentionRule::Symmetric)? {
                Triage::Positive => counts[0] += 1,
                Triage::Negative => counts[1] += 1,
                Triage::InsufficientInformation => counts[2] += 1,
            }
        }
        println!("k = {k:>2}: {} positive, {} negative, {} insufficient", counts[0], counts[1], counts[2]);
    }

    println!("\nsymmetric band");
    print!("{}", sweep_to_text(&abstention_sweep(&ensemble, &test_set, AbstentionRule::Symmetric)?));
    println!("\nnegatives at v <= 5 whatever k is");
    print!("{}", sweep_to_text(&abstention_sweep(&ensemble, &test_set, AbstentionRule::Asymmetric)?));
    Ok(())
}
