use serde::{Deserialize, Serialize};

use super::{convert, ColorSpaceId};
use crate::data::{StripSample, PAD_COUNT};
use crate::error::{Error, Result};

/// 11 pads x 3 channels.
pub const FEATURE_LEN: usize = 3 * PAD_COUNT;

const DEGENERATE_STD: f64 = 1e-12;

/// Pad-major, channel-minor: `[Blood c1, Blood c2, Blood c3, Urobilinogen c1, ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub space: ColorSpaceId,
    pub standardized: bool,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, space: ColorSpaceId) -> Result<Self> {
        if values.len() != FEATURE_LEN {
            return Err(Error::invalid(format!("feature vector needs {FEATURE_LEN} values, got {}", values.len())));
        }
        Ok(FeatureVector {
            values,
            space,
            standardized: false,
        })
    }

    pub fn get(&self, pad: usize, channel: usize) -> f64 {
        self.values[3 * pad + channel]
    }
}

pub fn featurize(sample: &StripSample, space: ColorSpaceId) -> Result<FeatureVector> {
    let mut values = Vec::with_capacity(FEATURE_LEN);
    for px in sample.pads {
        values.extend_from_slice(&convert(&px.to_unit(), space)?);
    }
    Ok(FeatureVector {
        values,
        space,
        standardized: false,
    })
}

/// Per-feature moments fitted on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub space: ColorSpaceId,
    pub mean: Vec<f64>,
    /// Population standard deviation; degenerate columns hold 1.0.
    pub std: Vec<f64>,
    /// Features whose spread fell below 1e-12 and were left unscaled.
    pub degenerate: Vec<bool>,
}

impl StandardizationStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|&&d| d).count()
    }

    /// Standardizes a raw slice in place of the `FeatureVector` wrapper.
    pub fn transform_slice(&self, raw: &[f64], out: &mut [f64]) {
        for (((o, x), m), s) in out.iter_mut().zip(raw).zip(&self.mean).zip(&self.std) {
            *o = (x - m) / s;
        }
    }
}

/// Population mean and standard deviation per feature.
pub fn fit_standardizer(train: &[FeatureVector]) -> Result<StandardizationStats> {
    if train.len() < 2 {
        return Err(Error::invalid(format!("standardizer needs at least 2 vectors, got {}", train.len())));
    }
    let space = train[0].space;
    if let Some(v) = train.iter().find(|v| v.space != space) {
        return Err(Error::invalid(format!("mixed color spaces: {} and {}", space, v.space)));
    }
    let dim = train[0].values.len();
    if train.iter().any(|v| v.values.len() != dim) {
        return Err(Error::invalid("feature vectors differ in length"));
    }
    let n = train.len() as f64;
    let mut mean = vec![0.0; dim];
    for v in train {
        for (m, x) in mean.iter_mut().zip(&v.values) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dim];
    for v in train {
        for ((s, x), m) in var.iter_mut().zip(&v.values).zip(&mean) {
            *s += (x - m) * (x - m);
        }
    }
    let mut degenerate = vec![false; dim];
    let std = var
        .iter()
        .zip(degenerate.iter_mut())
        .map(|(s, flag)| {
            let sd = (s / n).sqrt();
            if sd < DEGENERATE_STD {
                *flag = true;
                1.0
            } else {
                sd
            }
        })
        .collect();
    Ok(StandardizationStats {
        space,
        mean,
        std,
        degenerate,
    })
}

pub fn apply_standardizer(stats: &StandardizationStats, v: &FeatureVector) -> Result<FeatureVector> {
    if v.space != stats.space {
        return Err(Error::invalid(format!(
            "standardizer fitted on {} applied to a {} vector",
            stats.space, v.space
        )));
    }
    if v.values.len() != stats.dim() {
        return Err(Error::invalid("feature length does not match standardizer"));
    }
    let mut values = vec![0.0; v.values.len()];
    stats.transform_slice(&v.values, &mut values);
    Ok(FeatureVector {
        values,
        space: v.space,
        standardized: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Center, ClinicalFlag, Gender, Label, Rgb8};
    use rand::{Rng, SeedableRng};

    fn white_sample() -> StripSample {
        StripSample {
            id: "w".into(),
            center: Center::C,
            age: 1,
            gender: Gender::Male,
            diabetes: ClinicalFlag::Unknown,
            blood_pressure: ClinicalFlag::Unknown,
            smoking: ClinicalFlag::Unknown,
            pcr_label: Label::Negative,
            pads: [Rgb8::new(255, 255, 255); PAD_COUNT],
        }
    }

    fn fv(values: Vec<f64>, space: ColorSpaceId) -> FeatureVector {
        FeatureVector::new(values, space).unwrap()
    }

    #[test]
    fn white_rgb_is_all_ones() {
        let v = featurize(&white_sample(), ColorSpaceId::Rgb).unwrap();
        assert_eq!(v.values, vec![1.0; FEATURE_LEN]);
        assert!(!v.standardized);
    }

    #[test]
    fn white_lab_repeats_reference_white() {
        let v = featurize(&white_sample(), ColorSpaceId::Lab).unwrap();
        for pad in 0..PAD_COUNT {
            assert!((v.get(pad, 0) - 100.0).abs() < 1e-3);
            assert!(v.get(pad, 1).abs() < 1e-3);
            assert!(v.get(pad, 2).abs() < 1e-3);
        }
        assert_eq!(v, featurize(&white_sample(), ColorSpaceId::Lab).unwrap());
    }

    #[test]
    fn pad_major_layout() {
        let mut s = white_sample();
        s.pads[1] = Rgb8::new(0, 51, 102);
        let v = featurize(&s, ColorSpaceId::Rgb).unwrap();
        assert_eq!(&v.values[3..6], &[0.0, 0.2, 0.4]);
    }

    #[test]
    fn zero_two_gives_mean_one_std_one() {
        let st = fit_standardizer(&[fv(vec![0.0; 33], ColorSpaceId::Rgb), fv(vec![2.0; 33], ColorSpaceId::Rgb)]).unwrap();
        assert!(st.mean.iter().all(|&m| m == 1.0));
        assert!(st.std.iter().all(|&s| s == 1.0));
        assert_eq!(st.degenerate_count(), 0);
    }

    #[test]
    fn constant_column_is_flagged() {
        let mut a = vec![0.0; 33];
        let mut b = vec![1.0; 33];
        a[5] = 3.0;
        b[5] = 3.0;
        let st = fit_standardizer(&[fv(a, ColorSpaceId::Hsv), fv(b, ColorSpaceId::Hsv)]).unwrap();
        assert!(st.degenerate[5]);
        assert_eq!(st.std[5], 1.0);
        assert_eq!(st.degenerate_count(), 1);
    }

    #[test]
    fn precondition_errors() {
        assert!(fit_standardizer(&[fv(vec![0.0; 33], ColorSpaceId::Rgb)]).is_err());
        assert!(fit_standardizer(&[fv(vec![0.0; 33], ColorSpaceId::Rgb), fv(vec![1.0; 33], ColorSpaceId::Hsv)]).is_err());
        let st = fit_standardizer(&[fv(vec![0.0; 33], ColorSpaceId::Rgb), fv(vec![1.0; 33], ColorSpaceId::Rgb)]).unwrap();
        assert!(apply_standardizer(&st, &fv(vec![0.0; 33], ColorSpaceId::Lab)).is_err());
        assert!(FeatureVector::new(vec![0.0; 5], ColorSpaceId::Rgb).is_err());
    }

    #[test]
    fn mean_maps_to_zero_and_moments_are_unit() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let train: Vec<_> = (0..50)
            .map(|_| fv((0..33).map(|j| rng.random::<f64>() * (j as f64 + 1.0) + j as f64).collect(), ColorSpaceId::Xyz))
            .collect();
        let st = fit_standardizer(&train).unwrap();
        let at_mean = apply_standardizer(&st, &fv(st.mean.clone(), ColorSpaceId::Xyz)).unwrap();
        assert!(at_mean.values.iter().all(|&x| x == 0.0));
        assert!(at_mean.standardized);

        let z: Vec<_> = train.iter().map(|v| apply_standardizer(&st, v).unwrap()).collect();
        for j in 0..33 {
            let m: f64 = z.iter().map(|v| v.values[j]).sum::<f64>() / 50.0;
            let sd = (z.iter().map(|v| (v.values[j] - m).powi(2)).sum::<f64>() / 50.0).sqrt();
            assert!(m.abs() < 1e-9);
            assert!((sd - 1.0).abs() < 1e-9);
        }
        // applying twice is not the identity in general
        let twice = apply_standardizer(&st, &z[0]).unwrap();
        assert_ne!(twice.values, z[0].values);
    }
}
