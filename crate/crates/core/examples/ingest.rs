//! Lenient versus strict ingestion of a sample CSV.
//!
//!     cargo run --example ingest -- path/to/samples.csv

use std::io::Cursor;

use stripscreen::data::{emit_csv, ingest_csv, ingest_reader};
use stripscreen::synth::{generate, SynthConfig};

fn main() -> stripscreen::Result<()> {
    if let Some(path) = std::env::args().nth(1) {
        let ing = ingest_csv(&path, false)?;
        println!("{path}: {} accepted, {} rejected", ing.dataset.len(), ing.rejections.len());
        print!("{}", ing.rejections.to_csv());
        return Ok(());
    }

    // Without a file: corrupt two rows of a synthetic set.
    let ds = generate(&SynthConfig::preset("null")?.with_n(20))?;
    let mut text = emit_csv(&ds);
    text = text.replacen("S00003,", "S00003,Z,", 1);
    text = text.replacen("S00007,", "S00002,", 1);

    let lenient = ingest_reader(Cursor::new(text.as_bytes()), false)?;
    println!("lenient: {} accepted", lenient.dataset.len());
    for r in &lenient.rejections.rejected {
        println!("  line {} ({}): {}", r.line, r.id.as_deref().unwrap_or("?"), r.reason);
    }
    match ingest_reader(Cursor::new(text.as_bytes()), true) {
        Ok(_) => println!("strict: accepted"),
        Err(e) => println!("strict: {e}"),
    }
    Ok(())
}
