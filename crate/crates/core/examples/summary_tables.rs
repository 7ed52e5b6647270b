//! Dataset statistics, gender by center and clinical indicators by center.

use stripscreen::data::summarize;
use stripscreen::synth::{generate, SynthConfig};

fn main() -> stripscreen::Result<()> {
    let ds = generate(&SynthConfig::preset("paper-like")?)?;
    let report = summarize(&ds)?;
    print!("{}", report.to_text());
    println!();
    print!("{}", report.gender_csv());
    print!("{}", report.clinical_csv());
    Ok(())
}
