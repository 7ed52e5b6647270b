//! Healthy-versus-sick t-tests per channel and the correlation blocks.

use stripscreen::color::ColorSpaceId;
use stripscreen::stats::{correlation_matrix, group_difference_table, TTestVariant, Variable};
use stripscreen::synth::{generate, SynthConfig};

fn main() -> stripscreen::Result<()> {
    let ds = generate(&SynthConfig::preset("paper-like")?.with_n(600))?;

    let welch = group_difference_table(&ds, ColorSpaceId::Rgb, TTestVariant::Welch)?;
    print!("{}", welch.to_text());
    let pooled = group_difference_table(&ds, ColorSpaceId::Rgb, TTestVariant::Pooled)?;
    let below = |t: &stripscreen::stats::PValueTable| t.p_values().filter(|&p| p < 0.05).count();
    println!("p < 0.05: welch {} / 33, pooled {} / 33", below(&welch), below(&pooled));

    let urine = correlation_matrix(&ds, &Variable::urine_block(ColorSpaceId::Hsv))?;
    let pcr = urine.index_of("pcr").expect("pcr column");
    let mut strongest: Vec<(f64, &str)> = urine.names.iter().enumerate().filter(|&(i, _)| i != pcr).map(|(i, n)| (urine.get(i, pcr), n.as_str())).collect();
    strongest.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
    println!("strongest hsv channels against pcr:");
    for (r, name) in strongest.iter().take(5) {
        println!("  {name:<24} {r:+.3}");
    }

    let clinical = correlation_matrix(&ds, &Variable::clinical_block())?;
    print!("{}", clinical.to_csv());
    Ok(())
}
