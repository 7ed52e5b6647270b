//! Synthetic strip samples with class-conditional Gaussian pad colors.
//!
//! Each sample draws from its own ChaCha8 stream (seed, stream = sample
//! index), so any subset can be regenerated independently and chunked
//! generation matches sequential generation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::color::FEATURE_LEN;
use crate::data::{Center, ClinicalFlag, Dataset, Gender, Label, Provenance, Rgb8, StripSample, PAD_COUNT};
use crate::error::{Error, Result};

/// A scalar applies to all 33 channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelValues {
    Scalar(f64),
    PerChannel(Vec<f64>),
}

impl ChannelValues {
    pub fn resolve(&self, name: &str) -> Result<Vec<f64>> {
        match self {
            ChannelValues::Scalar(v) => Ok(vec![*v; FEATURE_LEN]),
            ChannelValues::PerChannel(v) if v.len() == FEATURE_LEN => Ok(v.clone()),
            ChannelValues::PerChannel(v) => Err(Error::data(format!(
                "{name} needs 1 or {FEATURE_LEN} values, got {}",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n: usize,
    pub positive_prior: f64,
    /// Healthy-class channel means in byte units, pad-major RGB.
    pub mu0: ChannelValues,
    pub mu1: ChannelValues,
    pub sigma: ChannelValues,
    #[serde(default)]
    pub seed: u64,
    /// Weight of one latent factor shared by every channel of a sample.
    /// Marginal spread stays `sigma`; 0 gives independent channels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latent_loading: Option<f64>,
}

pub const PRESET_NAMES: [&str; 3] = ["separable", "paper-like", "null"];

impl SynthConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SynthConfig = toml::from_str(text).map_err(|e| Error::data(format!("synth config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// One of the shipped benchmark configurations.
    pub fn preset(name: &str) -> Result<Self> {
        let text = match name {
            "separable" => include_str!("../configs/separable.cfg"),
            "paper-like" => include_str!("../configs/paper-like.cfg"),
            "null" => include_str!("../configs/null.cfg"),
            _ => {
                return Err(Error::invalid(format!(
                    "unknown preset '{name}' (expected one of {})",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        Self::from_toml_str(text)
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::data("synth config: n must be positive"));
        }
        if !(self.positive_prior > 0.0 && self.positive_prior < 1.0) {
            return Err(Error::data("synth config: positive_prior must lie in (0, 1)"));
        }
        for (name, v) in [("mu0", &self.mu0), ("mu1", &self.mu1)] {
            if v.resolve(name)?.iter().any(|m| !(0.0..=255.0).contains(m)) {
                return Err(Error::data(format!("synth config: {name} values must lie in [0, 255]")));
            }
        }
        if self.sigma.resolve("sigma")?.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::data("synth config: sigma values must be positive"));
        }
        if let Some(r) = self.latent_loading {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::data("synth config: latent_loading must lie in [0, 1)"));
            }
        }
        Ok(())
    }

    /// Mahalanobis distance between the class means under the shared
    /// diagonal covariance.
    pub fn separation(&self) -> Result<f64> {
        let (m0, m1, s) = (self.mu0.resolve("mu0")?, self.mu1.resolve("mu1")?, self.sigma.resolve("sigma")?);
        Ok(m0.iter().zip(&m1).zip(&s).map(|((a, b), s)| ((b - a) / s).powi(2)).sum::<f64>().sqrt())
    }
}

/// Accuracy of the optimal classifier, `Phi(D / 2)`. Only defined for equal
/// priors and independent channels. Byte rounding and clamping are ignored.
pub fn bayes_accuracy(cfg: &SynthConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.positive_prior != 0.5 {
        return Err(Error::invalid("closed-form Bayes accuracy needs positive_prior = 0.5"));
    }
    if cfg.latent_loading.is_some_and(|r| r != 0.0) {
        return Err(Error::invalid("closed-form Bayes accuracy needs independent channels"));
    }
    let d = cfg.separation()?;
    if d.is_infinite() {
        return Ok(1.0);
    }
    Ok(Normal::standard().cdf(d / 2.0))
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub dataset: Dataset,
    pub clamped_channels: usize,
    pub total_channels: usize,
}

impl Generated {
    pub fn clamp_rate(&self) -> f64 {
        self.clamped_channels as f64 / self.total_channels as f64
    }
}

fn flag(rng: &mut impl Rng) -> ClinicalFlag {
    let u: f64 = rng.random();
    if u < 0.1 {
        ClinicalFlag::Positive
    } else if u < 0.9 {
        ClinicalFlag::Negative
    } else {
        ClinicalFlag::Unknown
    }
}

fn clamp_byte(v: f64) -> (u8, bool) {
    let r = v.round();
    if r < 0.0 {
        (0, true)
    } else if r > 255.0 {
        (255, true)
    } else {
        (r as u8, false)
    }
}

pub fn generate_with_report(cfg: &SynthConfig) -> Result<Generated> {
    cfg.validate()?;
    let (m0, m1, sd) = (cfg.mu0.resolve("mu0")?, cfg.mu1.resolve("mu1")?, cfg.sigma.resolve("sigma")?);
    let rho = cfg.latent_loading.unwrap_or(0.0);
    let own = (1.0 - rho * rho).sqrt();
    let width = cfg.n.to_string().len().max(5);

    let rows: Vec<(StripSample, usize)> = (0..cfg.n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            let positive = rng.random::<f64>() < cfg.positive_prior;
            let mu = if positive { &m1 } else { &m0 };
            let latent: f64 = rng.sample(StandardNormal);
            let mut pads = [Rgb8::default(); PAD_COUNT];
            let mut clamped = 0;
            for (p, px) in pads.iter_mut().enumerate() {
                let mut c = [0u8; 3];
                for (ch, out) in c.iter_mut().enumerate() {
                    let j = 3 * p + ch;
                    let e: f64 = rng.sample(StandardNormal);
                    let (b, hit) = clamp_byte(mu[j] + sd[j] * (rho * latent + own * e));
                    *out = b;
                    clamped += usize::from(hit);
                }
                *px = Rgb8::new(c[0], c[1], c[2]);
            }
            let sample = StripSample {
                id: format!("S{i:0width$}"),
                center: Center::ALL[rng.random_range(0..4)],
                age: rng.random_range(18..=80),
                gender: if rng.random::<bool>() { Gender::Male } else { Gender::Female },
                diabetes: flag(&mut rng),
                blood_pressure: flag(&mut rng),
                smoking: flag(&mut rng),
                pcr_label: Label::from_bool(positive),
                pads,
            };
            (sample, clamped)
        })
        .collect();

    let clamped_channels = rows.iter().map(|(_, c)| c).sum();
    let samples = rows.into_iter().map(|(s, _)| s).collect();
    Ok(Generated {
        dataset: Dataset::new(samples, Provenance::in_memory("synthetic"))?,
        clamped_channels,
        total_channels: cfg.n * FEATURE_LEN,
    })
}

pub fn generate(cfg: &SynthConfig) -> Result<Dataset> {
    Ok(generate_with_report(cfg)?.dataset)
}

/// Uniform permutation of the labels; features and ids stay in place.
pub fn shuffle_labels(ds: &Dataset, seed: u64) -> Result<Dataset> {
    ds.require_non_empty("label shuffle")?;
    let mut labels = ds.labels();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ds.with_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mu0: f64, mu1: f64) -> SynthConfig {
        SynthConfig {
            n: 1000,
            positive_prior: 0.5,
            mu0: ChannelValues::Scalar(mu0),
            mu1: ChannelValues::Scalar(mu1),
            sigma: ChannelValues::Scalar(10.0),
            seed: 42,
            latent_loading: None,
        }
    }

    #[test]
    fn presets_load_and_hit_their_targets() {
        let b = |n| bayes_accuracy(&SynthConfig::preset(n).unwrap()).unwrap();
        assert!((b("separable") - 0.98).abs() < 1e-3);
        assert!((b("paper-like") - 0.66).abs() < 1e-3);
        assert_eq!(b("null"), 0.5);
        assert!(SynthConfig::preset("other").is_err());
        for name in PRESET_NAMES {
            let g = generate_with_report(&SynthConfig::preset(name).unwrap()).unwrap();
            assert!(g.clamp_rate() < 0.01, "{name}: {}", g.clamp_rate());
        }
    }

    #[test]
    fn bayes_single_channel() {
        let mut m1 = vec![100.0; 33];
        m1[7] = 120.0;
        let cfg = SynthConfig {
            mu1: ChannelValues::PerChannel(m1),
            ..small(100.0, 100.0)
        };
        assert!((bayes_accuracy(&cfg).unwrap() - 0.841_344_746_068_542_9).abs() < 1e-4);
        assert_eq!(bayes_accuracy(&small(100.0, 100.0)).unwrap(), 0.5);
        assert!(bayes_accuracy(&SynthConfig { positive_prior: 0.3, ..small(0.0, 255.0) }).is_err());
        assert!(bayes_accuracy(&SynthConfig { sigma: ChannelValues::Scalar(1e-3), ..small(0.0, 255.0) }).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn deterministic_and_prior_respected() {
        let cfg = small(100.0, 140.0);
        let a = generate(&cfg).unwrap();
        assert_eq!(a, generate(&cfg).unwrap());
        let pos = a.positive_count();
        assert!((440..=560).contains(&pos), "{pos}");
        assert_ne!(a, generate(&cfg.clone().with_seed(43)).unwrap());
    }

    #[test]
    fn shorter_run_is_a_prefix() {
        let cfg = small(100.0, 140.0);
        let full = generate(&cfg).unwrap();
        let head = generate(&cfg.clone().with_n(10)).unwrap();
        for (a, b) in head.samples().iter().zip(full.samples()) {
            assert_eq!(a.pads, b.pads);
            assert_eq!(a.pcr_label, b.pcr_label);
        }
    }

    #[test]
    fn class_means_converge() {
        // each channel mean lands within 3 sigma / sqrt(n) with probability 0.9973
        let (mut inside, mut checks) = (0, 0);
        for seed in 0..5 {
            let ds = generate(&small(90.0, 150.0).with_seed(seed)).unwrap();
            for (label, mu) in [(Label::Negative, 90.0), (Label::Positive, 150.0)] {
                let members: Vec<_> = ds.samples().iter().filter(|s| s.pcr_label == label).collect();
                let n = members.len() as f64;
                for p in 0..PAD_COUNT {
                    for ch in 0..3 {
                        let mean = members.iter().map(|s| s.pads[p].channels()[ch] as f64).sum::<f64>() / n;
                        inside += usize::from((mean - mu).abs() < 3.0 * 10.0 / n.sqrt());
                        checks += 1;
                    }
                }
            }
        }
        assert!(inside as f64 / checks as f64 >= 0.98, "{inside}/{checks}");
    }

    #[test]
    fn latent_factor_correlates_channels() {
        let cfg = SynthConfig {
            latent_loading: Some(0.8),
            ..small(120.0, 120.0)
        };
        let ds = generate(&cfg).unwrap();
        let a: Vec<f64> = ds.samples().iter().map(|s| s.pads[0].r as f64).collect();
        let b: Vec<f64> = ds.samples().iter().map(|s| s.pads[5].b as f64).collect();
        let r = crate::stats::pearson(&a, &b).unwrap();
        assert!((r - 0.64).abs() < 0.08, "{r}");
        assert!(bayes_accuracy(&cfg).is_err());
    }

    #[test]
    fn invalid_configs() {
        assert!(SynthConfig { n: 0, ..small(1.0, 2.0) }.validate().is_err());
        assert!(SynthConfig { positive_prior: 1.0, ..small(1.0, 2.0) }.validate().is_err());
        assert!(small(-1.0, 2.0).validate().is_err());
        assert!(SynthConfig { sigma: ChannelValues::Scalar(0.0), ..small(1.0, 2.0) }.validate().is_err());
        assert!(SynthConfig { mu0: ChannelValues::PerChannel(vec![1.0; 5]), ..small(1.0, 2.0) }.validate().is_err());
        assert!(SynthConfig::from_toml_str("n = 5\npositive_prior = 0.5\nmu0 = 1\nmu1 = 1\nsigma = 1\nextra = 2\n").is_err());
    }

    #[test]
    fn shuffle_preserves_marginal() {
        let ds = generate(&small(100.0, 140.0)).unwrap();
        let sh = shuffle_labels(&ds, 5).unwrap();
        assert_eq!(sh.positive_count(), ds.positive_count());
        assert_eq!(sh, shuffle_labels(&ds, 5).unwrap());
        for (a, b) in ds.samples().iter().zip(sh.samples()) {
            assert_eq!(a.pads, b.pads);
        }
        // expected fixed points of a label permutation: sum of squared class shares
        let mut fixed = 0.0;
        for seed in 0..100 {
            let s = shuffle_labels(&ds, seed).unwrap();
            fixed += ds.labels().iter().zip(s.labels()).filter(|(a, b)| *a == b).count() as f64 / 1000.0;
        }
        let p = ds.positive_count() as f64 / 1000.0;
        let expected = p * p + (1.0 - p) * (1.0 - p);
        assert!((fixed / 100.0 - expected).abs() < 0.01);
    }
}
