use proptest::prelude::*;

use stripscreen::color::{featurize, ColorSpaceId};
use stripscreen::data::{emit_csv, ingest_reader, split};
use stripscreen::ensemble::{train_ensemble, EnsembleModel};
use stripscreen::experiment::{run_repeated, ExperimentPlan, Tuning};
use stripscreen::learners::{Family, ModelConfig};
use stripscreen::stats::{correlation_matrix, group_difference_table, TTestVariant, Variable};
use stripscreen::synth::{generate, SynthConfig};

fn small_plan() -> ExperimentPlan {
    ExperimentPlan {
        spaces: vec![ColorSpaceId::Yiq, ColorSpaceId::Rgb],
        families: vec![Family::Logreg, Family::GradientBoosting],
        reps: 3,
        master_seed: 11,
        tuning: Tuning::GridOnce,
        ..ExperimentPlan::default()
    }
}

#[test]
fn experiment_ignores_thread_count_and_listing_order() {
    let ds = generate(&SynthConfig::preset("paper-like").unwrap().with_n(240)).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_repeated(&ds, &small_plan())).unwrap();
    let b = four.install(|| run_repeated(&ds, &small_plan())).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_jsonl().unwrap(), b.to_jsonl().unwrap());

    let mut shuffled = small_plan();
    shuffled.spaces.reverse();
    shuffled.families.reverse();
    let c = run_repeated(&ds, &shuffled).unwrap();
    assert_eq!(a.to_csv(), c.to_csv());
    assert_eq!(a.per_rep.len(), 3 * 4);
}

#[test]
fn csv_round_trip_keeps_results() {
    let ds = generate(&SynthConfig::preset("separable").unwrap().with_n(150)).unwrap();
    let text = emit_csv(&ds);
    let back = ingest_reader(text.as_bytes(), true).unwrap().dataset;
    assert_eq!(emit_csv(&back), text);
    let (tr, _) = split(&back, 0.2, 3, true).unwrap();
    let (tr0, _) = split(&ds, 0.2, 3, true).unwrap();
    let cfg = ModelConfig::new(Family::Logreg, 0);
    let a = train_ensemble(&tr, &cfg, 1).unwrap();
    let b = train_ensemble(&tr0, &cfg, 1).unwrap();
    assert_eq!(a.votes(&ds).unwrap(), b.votes(&ds).unwrap());
}

#[test]
fn ensemble_file_round_trip() {
    let ds = generate(&SynthConfig::preset("separable").unwrap().with_n(200)).unwrap();
    let e = train_ensemble(&ds, &ModelConfig::new(Family::RandomForest, 0).with_seed(0), 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.model");
    e.save(&path).unwrap();
    let back = EnsembleModel::load(&path).unwrap();
    assert_eq!(back, e);
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() / 2);
    assert!(EnsembleModel::from_bytes(&bytes).is_err());
}

#[test]
fn separated_groups_give_small_p_values() {
    let ds = generate(&SynthConfig::preset("separable").unwrap()).unwrap();
    for variant in [TTestVariant::Welch, TTestVariant::Pooled] {
        let t = group_difference_table(&ds, ColorSpaceId::Rgb, variant).unwrap();
        assert!(t.p_values().all(|p| p < 1e-6), "{variant:?}");
    }
    let null = generate(&SynthConfig::preset("null").unwrap()).unwrap();
    let t = group_difference_table(&null, ColorSpaceId::Rgb, TTestVariant::Welch).unwrap();
    assert!(t.p_values().filter(|&p| p < 0.01).count() <= 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn correlation_matrices_are_symmetric(seed in 0u64..1000, n in 150usize..300) {
        let ds = generate(&SynthConfig::preset("paper-like").unwrap().with_n(n).with_seed(seed)).unwrap();
        for vars in [Variable::urine_block(ColorSpaceId::Lab), Variable::clinical_block()] {
            let m = correlation_matrix(&ds, &vars).unwrap();
            for i in 0..m.names.len() {
                prop_assert!((m.get(i, i) - 1.0).abs() < 1e-12);
                for j in 0..m.names.len() {
                    prop_assert_eq!(m.get(i, j), m.get(j, i));
                    prop_assert!(m.get(i, j).abs() <= 1.0);
                }
            }
        }
    }

    #[test]
    fn features_are_finite_with_33_entries(seed in 0u64..10_000) {
        let ds = generate(&SynthConfig::preset("separable").unwrap().with_n(5).with_seed(seed)).unwrap();
        for s in ds.samples() {
            for space in ColorSpaceId::ALL {
                let f = featurize(s, space).unwrap();
                prop_assert_eq!(f.values.len(), 33);
                prop_assert!(f.values.iter().all(|v| v.is_finite()));
            }
        }
    }
}
