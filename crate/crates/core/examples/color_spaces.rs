//! Convert one pad color into all 11 feature spaces.
//!
//!     cargo run --example color_spaces -- 200 120 40

use stripscreen::color::{convert, ColorSpaceId};
use stripscreen::data::Rgb8;

fn main() -> stripscreen::Result<()> {
    let args: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let px = match args[..] {
        [r, g, b] => Rgb8::new(r, g, b),
        _ => Rgb8::new(200, 120, 40),
    };
    println!("input rgb8 ({}, {}, {})", px.r, px.g, px.b);
    for space in ColorSpaceId::ALL {
        let v = convert(&px.to_unit(), space)?;
        let names = space.channel_names();
        println!(
            "{:<6} {}={:>10.5} {}={:>10.5} {}={:>10.5}",
            space.name(),
            names[0],
            v[0],
            names[1],
            v[1],
            names[2],
            v[2]
        );
    }
    Ok(())
}
