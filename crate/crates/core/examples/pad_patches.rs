//! Reduce PPM pad crops to the mean colors a sample row stores.

use stripscreen::data::{mean_pad_color, read_ppm_patch, sample_pads_from_ppm, PadId, Patch, Rgb8, PAD_COUNT};

fn main() -> stripscreen::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut paths = Vec::new();
    for (i, pad) in PadId::ALL.iter().enumerate() {
        let (w, h) = (6usize, 4usize);
        let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
        for y in 0..h {
            for x in 0..w {
                // a gradient so the mean is not just one pixel
                bytes.extend([(20 * i) as u8, (x * 30) as u8, (y * 50) as u8]);
            }
        }
        let path = dir.path().join(format!("{}.ppm", pad.token()));
        std::fs::write(&path, bytes).expect("write ppm");
        paths.push(path);
    }

    let first = read_ppm_patch(&paths[0])?;
    println!("{}: {}x{} pixels, mean {:?}", PadId::ALL[0], first.width(), first.height(), mean_pad_color(&first)?);

    let pads: [Rgb8; PAD_COUNT] = sample_pads_from_ppm(&paths)?;
    for (pad, c) in PadId::ALL.iter().zip(pads) {
        println!("{:<17} {:>3} {:>3} {:>3}", pad.display_name(), c.r, c.g, c.b);
    }

    let flat = Patch::uniform(3, 3, Rgb8::new(10, 20, 30));
    assert_eq!(mean_pad_color(&flat)?, Rgb8::new(10, 20, 30));
    Ok(())
}
