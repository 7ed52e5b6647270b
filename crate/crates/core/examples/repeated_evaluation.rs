//! Repeated stratified splits across spaces and families, with the
//! ensemble row and its averaged abstention sweep.
//!
//!     cargo run --release --example repeated_evaluation -- 5

use stripscreen::color::ColorSpaceId;
use stripscreen::experiment::{run_repeated, ExperimentPlan, Tuning};
use stripscreen::learners::Family;
use stripscreen::synth::{generate, SynthConfig};

fn main() -> stripscreen::Result<()> {
    let reps = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let ds = generate(&SynthConfig::preset("paper-like")?.with_n(800))?;
    let plan = ExperimentPlan {
        spaces: ColorSpaceId::ALL.to_vec(),
        families: vec![Family::Mlp, Family::Logreg],
        reps,
        master_seed: 100,
        tuning: Tuning::Fixed,
        ensemble: Some(Family::Mlp),
        ..ExperimentPlan::default()
    };
    let report = run_repeated(&ds, &plan)?;
    print!("{}", report.to_text());
    if let Some(sweep) = report.sweep_csv() {
        println!();
        print!("{sweep}");
    }
    Ok(())
}
