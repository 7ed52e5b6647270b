use std::path::Path;

use super::{Rgb8, PAD_COUNT};
use crate::error::{Error, Result};

/// A rectangular grid of pixels cropped from one pad.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    width: usize,
    height: usize,
    pixels: Vec<Rgb8>,
}

impl Patch {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "patch {width}x{height} needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Patch { width, height, pixels })
    }

    pub fn uniform(width: usize, height: usize, color: Rgb8) -> Self {
        Patch {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb8] {
        &self.pixels
    }
}

/// Per-channel mean of a patch, rounded half-up.
pub fn mean_pad_color(patch: &Patch) -> Result<Rgb8> {
    let n = patch.pixels.len() as u64;
    if n == 0 {
        return Err(Error::invalid("empty patch"));
    }
    let mut sums = [0u64; 3];
    for px in &patch.pixels {
        for (s, c) in sums.iter_mut().zip(px.channels()) {
            *s += c as u64;
        }
    }
    // floor(sum / n + 1/2) in exact integer arithmetic
    let round = |sum: u64| ((2 * sum + n) / (2 * n)) as u8;
    Ok(Rgb8::new(round(sums[0]), round(sums[1]), round(sums[2])))
}

/// Loads a plain (P3) or raw (P6) portable pixmap as a patch.
pub fn read_ppm_patch(path: impl AsRef<Path>) -> Result<Patch> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if !(bytes.starts_with(b"P3") || bytes.starts_with(b"P6")) {
        return Err(Error::data(format!("{}: not a P3/P6 pixmap", path.display())));
    }
    let img = image::load_from_memory_with_format(&bytes, image::ImageFormat::Pnm)
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?
        .to_rgb8();
    let (w, h) = img.dimensions();
    let pixels = img.pixels().map(|p| Rgb8::new(p[0], p[1], p[2])).collect();
    Patch::new(w as usize, h as usize, pixels)
}

/// Reduces 11 pad patch files (canonical pad order) to mean colors.
pub fn sample_pads_from_ppm<P: AsRef<Path>>(paths: &[P]) -> Result<[Rgb8; PAD_COUNT]> {
    if paths.len() != PAD_COUNT {
        return Err(Error::invalid(format!("expected {PAD_COUNT} pad patches, got {}", paths.len())));
    }
    let mut pads = [Rgb8::default(); PAD_COUNT];
    for (slot, path) in pads.iter_mut().zip(paths) {
        *slot = mean_pad_color(&read_ppm_patch(path)?)?;
    }
    Ok(pads)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_patch_mean_is_the_color() {
        let p = Patch::uniform(4, 3, Rgb8::new(10, 20, 30));
        assert_eq!(mean_pad_color(&p).unwrap(), Rgb8::new(10, 20, 30));
    }

    #[test]
    fn half_rounds_up() {
        // 127.5 -> 128
        let p = Patch::new(2, 1, vec![Rgb8::new(0, 0, 0), Rgb8::new(255, 255, 255)]).unwrap();
        assert_eq!(mean_pad_color(&p).unwrap(), Rgb8::new(128, 128, 128));
    }

    #[test]
    fn singleton_and_below_half() {
        let p = Patch::new(1, 1, vec![Rgb8::new(7, 8, 9)]).unwrap();
        assert_eq!(mean_pad_color(&p).unwrap(), Rgb8::new(7, 8, 9));
        // (0+0+1)/3 = 0.33 -> 0, (2+2+1)/3 = 1.67 -> 2
        let p = Patch::new(3, 1, vec![Rgb8::new(0, 2, 0), Rgb8::new(0, 2, 0), Rgb8::new(1, 1, 0)]).unwrap();
        assert_eq!(mean_pad_color(&p).unwrap(), Rgb8::new(0, 2, 0));
    }

    #[test]
    fn empty_patch_errors() {
        let p = Patch::new(0, 0, vec![]).unwrap();
        assert!(mean_pad_color(&p).is_err());
        assert!(Patch::new(2, 2, vec![Rgb8::default()]).is_err());
    }

    #[test]
    fn reads_p3_and_p6() {
        let dir = tempfile::tempdir().unwrap();
        let p3 = dir.path().join("a.ppm");
        std::fs::write(&p3, "P3\n2 1\n255\n0 0 0  255 255 255\n").unwrap();
        let patch = read_ppm_patch(&p3).unwrap();
        assert_eq!((patch.width(), patch.height()), (2, 1));
        assert_eq!(mean_pad_color(&patch).unwrap(), Rgb8::new(128, 128, 128));

        let p6 = dir.path().join("b.ppm");
        let mut raw = b"P6\n1 2\n255\n".to_vec();
        raw.extend_from_slice(&[1, 2, 3, 3, 4, 5]);
        std::fs::write(&p6, raw).unwrap();
        assert_eq!(mean_pad_color(&read_ppm_patch(&p6).unwrap()).unwrap(), Rgb8::new(2, 3, 4));

        let bad = dir.path().join("c.ppm");
        std::fs::write(&bad, "P2\n1 1\n255\n0\n").unwrap();
        assert!(read_ppm_patch(&bad).is_err());
    }
}
