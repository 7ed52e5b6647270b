use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{Error, Result};

/// Seeded train/test partition.
///
/// The test part holds `round(n * test_fraction)` samples. With
/// `stratified`, that count is divided between the classes in proportion to
/// their sizes, so each class lands within one sample of exact
/// proportionality. Both parts keep the original file order.
pub fn split(ds: &Dataset, test_fraction: f64, seed: u64, stratified: bool) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!("test fraction {test_fraction} not in (0,1)")));
    }
    let n = ds.len();
    let n_test = (n as f64 * test_fraction).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::degenerate(format!(
            "test fraction {test_fraction} of {n} samples leaves an empty part"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_test = vec![false; n];
    if stratified {
        let (mut pos, mut neg): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&i| ds.samples()[i].pcr_label.is_positive());
        let pos_test = ((n_test * pos.len()) as f64 / n as f64).round() as usize;
        let neg_test = n_test - pos_test;
        pos.shuffle(&mut rng);
        neg.shuffle(&mut rng);
        for &i in pos.iter().take(pos_test).chain(neg.iter().take(neg_test)) {
            is_test[i] = true;
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        for &i in &all[..n_test] {
            is_test[i] = true;
        }
    }

    let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| is_test[i]);
    Ok((ds.select(&train_idx), ds.select(&test_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Center, ClinicalFlag, Gender, Label, Rgb8, StripSample, PAD_COUNT};
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn ds(n: usize, positives: usize) -> Dataset {
        let samples = (0..n)
            .map(|i| StripSample {
                id: format!("s{i}"),
                center: Center::A,
                age: 30,
                gender: Gender::Female,
                diabetes: ClinicalFlag::Negative,
                blood_pressure: ClinicalFlag::Negative,
                smoking: ClinicalFlag::Negative,
                // interleave classes so file order is not class order
                pcr_label: Label::from_bool(i * positives / n != (i + 1) * positives / n),
                pads: [Rgb8::new(1, 2, 3); PAD_COUNT],
            })
            .collect();
        Dataset::from_samples(samples).unwrap()
    }

    #[test]
    fn ten_samples_tenth_is_nine_plus_one() {
        let (tr, te) = split(&ds(10, 5), 0.1, 3, false).unwrap();
        assert_eq!((tr.len(), te.len()), (9, 1));
    }

    #[test]
    fn stratified_hundred_with_forty_positive() {
        let d = ds(100, 40);
        assert_eq!(d.positive_count(), 40);
        for seed in 0..20 {
            let (_, te) = split(&d, 0.1, seed, true).unwrap();
            assert_eq!(te.len(), 10);
            assert_eq!(te.positive_count(), 4);
        }
    }

    #[test]
    fn deterministic_for_same_seed() {
        let d = ds(57, 20);
        let a = split(&d, 0.2, 99, true).unwrap();
        let b = split(&d, 0.2, 99, true).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let c = split(&d, 0.2, 100, true).unwrap();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn empty_part_is_an_error() {
        let d = ds(4, 2);
        assert!(split(&d, 0.01, 0, true).is_err());
        assert!(split(&d, 0.99, 0, true).is_err());
        assert!(split(&d, 1.0, 0, true).is_err());
    }

    proptest! {
        #[test]
        fn split_is_a_partition(n in 4usize..200, pos_frac in 0.0f64..1.0, frac in 0.05f64..0.6, seed: u64, strat: bool) {
            let positives = ((n as f64) * pos_frac) as usize;
            let d = ds(n, positives);
            if let Ok((tr, te)) = split(&d, frac, seed, strat) {
                prop_assert_eq!(tr.len() + te.len(), n);
                let a: HashSet<_> = tr.samples().iter().map(|s| s.id.clone()).collect();
                let b: HashSet<_> = te.samples().iter().map(|s| s.id.clone()).collect();
                prop_assert!(a.is_disjoint(&b));
                if strat {
                    let exact = te.len() as f64 * positives as f64 / n as f64;
                    prop_assert!((te.positive_count() as f64 - exact).abs() <= 1.0);
                }
            }
        }
    }
}
