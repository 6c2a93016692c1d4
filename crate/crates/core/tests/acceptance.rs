//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line with its runtime (visible with `--nocapture`).

use maxfun_core::classify::{
    evaluate_method, extract_dataset, run_pooling_comparison, ComparisonConfig, FeatureDataset,
    FilterBank, GridRegime, PoolMethod, Strategy, SvmParams,
};
use maxfun_core::csc::{
    epsilon_recursion, verify_stability, MuConvention, SolverKind, TrialConfig,
};
use maxfun_core::io::{load_image, pad_to_square, preprocess, split_indices, write_pgm};
use maxfun_core::mat::Image;
use maxfun_core::selftest;
use std::time::Instant;

fn report(id: u32, name: &str, start: Instant, ok: bool) {
    println!(
        "criterion {id} ({name}): {} in {:.2?}",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    assert!(ok, "criterion {id} ({name}) failed");
}

#[test]
fn criterion_1_sandwich_inequality() {
    let start = Instant::now();
    let result = selftest::suite_sandwich(1000);
    let ok = result.passed();
    if !ok {
        eprintln!("{}", result.detail);
    }
    let within_budget = start.elapsed().as_secs_f64() < 10.0;
    report(1, "sandwich inequality", start, ok && within_budget);
}

#[test]
fn criterion_2_non_expansiveness() {
    let start = Instant::now();
    let two_d = selftest::suite_nonexpansive_2d(10_000);
    let one_d = selftest::suite_nonexpansive_1d(10_000);
    let ok = two_d.passed() && one_d.passed();
    if !ok {
        eprintln!("{} | {}", two_d.detail, one_d.detail);
    }
    let within_budget = start.elapsed().as_secs_f64() < 30.0;
    report(2, "non-expansiveness", start, ok && within_budget);
}

#[test]
fn criterion_3_stability_theorem() {
    let start = Instant::now();
    // boundary noise really sits on the sphere of radius eps0
    for n1 in [32usize, 64] {
        let model = selftest::stability_model(n1);
        let trial = TrialConfig {
            seed: 5,
            eps0: 0.05,
            solver: SolverKind::Oracle,
            mu_convention: MuConvention::PerLayer,
            amp_range: (1.0, 2.0),
        };
        let rep = verify_stability(&model, &trial).unwrap();
        assert!((rep.noise_norm - 0.05).abs() < 1e-12);
        assert_eq!(rep.layers.len(), 2);
    }
    let result = selftest::suite_stability(100);
    let ok = result.passed();
    if !ok {
        eprintln!("{}", result.detail);
    }
    let within_budget = start.elapsed().as_secs_f64() < 60.0;
    report(3, "stability theorem", start, ok && within_budget);
}

#[test]
fn criterion_4_oracle_equivalence() {
    let start = Instant::now();
    let result = selftest::suite_oracle_equivalence(100);
    let ok = result.passed();
    if !ok {
        eprintln!("{}", result.detail);
    }
    let within_budget = start.elapsed().as_secs_f64() < 10.0;
    report(4, "oracle equivalence", start, ok && within_budget);
}

#[test]
fn criterion_5_epsilon_recursion() {
    let start = Instant::now();
    let out = epsilon_recursion(0.1, &[1], &[0.5]).unwrap();
    let direct_ok = (out[0] - 0.08).abs() <= 1e-15;

    let chain = epsilon_recursion(0.3, &[4, 2, 7, 1], &[0.0; 4]).unwrap();
    let mut prev = 0.3f64;
    let mut doubling_ok = true;
    for &e_sq in &chain {
        doubling_ok &= e_sq.sqrt() == 2.0 * prev;
        prev = e_sq.sqrt();
    }
    report(5, "epsilon recursion", start, direct_ok && doubling_ok);
}

#[test]
fn criterion_6_mutual_coherence() {
    let start = Instant::now();
    let result = selftest::suite_recursion_and_coherence(50);
    let ok = result.passed();
    if !ok {
        eprintln!("{}", result.detail);
    }
    report(6, "mutual coherence", start, ok);
}

fn fixture_dataset() -> FeatureDataset {
    let (raw, labels) = maxfun_core::classify::synthetic_corpus(3, 20, 7).unwrap();
    let images: Vec<Image<f64>> = raw.iter().map(|img| preprocess(img, 128).unwrap()).collect();
    let bank = FilterBank::oriented_plus_random(21);
    let tensors = extract_dataset(&images, &bank).unwrap();
    FeatureDataset {
        tensors,
        labels,
        class_names: vec!["class_0".into(), "class_1".into(), "class_2".into()],
    }
}

fn fixture_config() -> ComparisonConfig {
    ComparisonConfig {
        regimes: vec![
            GridRegime { window: 7, stride: 7 },
            GridRegime { window: 7, stride: 4 },
        ],
        max_radius: 3,
        alpha_grid: (1..=9).map(|i| i as f64 / 10.0).collect(),
        r_min_grid: vec![2, 3],
        test_fraction: 0.4,
        split_seed: 33,
        cv_k: 3,
        cv_seed: 17,
        svm: SvmParams {
            reg_c: 10.0,
            epochs: 20,
            seed: 5,
        },
    }
}

#[test]
fn criterion_7_classification_pipeline() {
    let start = Instant::now();
    let ds = fixture_dataset();
    let cfg = fixture_config();

    let table_a = run_pooling_comparison(&ds, &cfg).unwrap();
    let table_b = run_pooling_comparison(&ds, &cfg).unwrap();
    let deterministic = table_a.to_csv() == table_b.to_csv();

    // chance level for 3 classes with the binomial 3-sigma margin
    let n_test = table_a.test_size as f64;
    let p = 1.0 / 3.0;
    let threshold = p + 3.0 * (p * (1.0 - p) / n_test).sqrt();
    let mut beats_chance = true;
    for row in &table_a.rows {
        if row.accuracy <= threshold {
            eprintln!(
                "{} (w={}, s={}) accuracy {} below {threshold}",
                row.strategy.label(),
                row.window,
                row.stride,
                row.accuracy
            );
            beats_chance = false;
        }
    }

    // mixed pooling at the endpoints reproduces the avg/max cells exactly
    let (train_idx, test_idx) = split_indices(ds.len(), cfg.test_fraction, cfg.split_seed).unwrap();
    let mut endpoints_ok = true;
    for regime in &cfg.regimes {
        let find = |s: Strategy| {
            table_a
                .rows
                .iter()
                .find(|r| r.strategy == s && r.window == regime.window && r.stride == regime.stride)
                .map(|r| r.accuracy)
                .unwrap()
        };
        let mixed_at = |alpha: f64| {
            evaluate_method(
                &ds,
                *regime,
                &PoolMethod::Mixed { alpha },
                &train_idx,
                &test_idx,
                &cfg.svm,
            )
            .unwrap()
        };
        endpoints_ok &= mixed_at(0.0).to_bits() == find(Strategy::Average).to_bits();
        endpoints_ok &= mixed_at(1.0).to_bits() == find(Strategy::Maximum).to_bits();
    }

    let within_budget = start.elapsed().as_secs_f64() < 60.0;
    report(
        7,
        "classification pipeline",
        start,
        deterministic && beats_chance && endpoints_ok && within_budget,
    );
}

#[test]
fn criterion_8_degenerate_identity() {
    let start = Instant::now();
    let result = selftest::suite_degenerate_identity(100);
    let ok = result.passed();
    if !ok {
        eprintln!("{}", result.detail);
    }
    report(8, "degenerate identity", start, ok);
}

#[test]
fn criterion_9_preprocessing() {
    let start = Instant::now();
    // centered padding example: 100x120 gains exactly 10 rows each side
    let img = Image::from_fn(100, 120, |i, j| ((i * 7 + j * 3) % 97) as f64 / 96.0);
    let padded = pad_to_square(&img);
    let mut pad_ok = padded.rows() == 120 && padded.cols() == 120;
    for j in 0..120 {
        for i in 0..10 {
            pad_ok &= padded.get(i, j) == 0.0 && padded.get(119 - i, j) == 0.0;
        }
    }
    for i in 0..100 {
        for j in 0..120 {
            pad_ok &= padded.get(i + 10, j) == img.get(i, j);
        }
    }

    // load -> pad -> resize determinism from a real file, twice
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fixture.pgm");
    write_pgm(&path, &img).unwrap();
    let run = || {
        let loaded = load_image(&path).unwrap();
        preprocess(&loaded, 128).unwrap()
    };
    let a = run();
    let b = run();
    let deterministic = a
        .data()
        .iter()
        .zip(b.data())
        .all(|(x, y)| x.to_bits() == y.to_bits());
    let shape_ok = a.rows() == 128 && a.cols() == 128 && a.data().iter().all(|&v| v >= 0.0);

    report(
        9,
        "preprocessing",
        start,
        pad_ok && deterministic && shape_ok,
    );
}
