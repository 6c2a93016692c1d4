//! Property tests for the algebraic invariants of the numeric kernels.

use maxfun_core::csc::SparseCode;
use maxfun_core::mat::{devectorize, vectorize, Image};
use maxfun_core::pooling::{
    make_grid, pool_avg, pool_max, pool_maxfun, pool_mixed, pool_stochastic, MaxfunConfig,
};
use proptest::prelude::*;

fn image_strategy(max_side: usize, lo: f64, hi: f64) -> impl Strategy<Value = Image<f64>> {
    (1..=max_side, 1..=max_side).prop_flat_map(move |(rows, cols)| {
        proptest::collection::vec(lo..hi, rows * cols)
            .prop_map(move |data| Image::new(rows, cols, data).unwrap())
    })
}

/// Non-negative image whose sides are multiples of an odd window.
fn pooled_image_strategy() -> impl Strategy<Value = (Image<f64>, usize)> {
    (prop_oneof![Just(3usize), Just(5), Just(7)], 1..=3usize, 1..=3usize).prop_flat_map(
        |(w, k1, k2)| {
            let (rows, cols) = (w * k1, w * k2);
            proptest::collection::vec(0.0..8.0, rows * cols)
                .prop_map(move |data| (Image::new(rows, cols, data).unwrap(), w))
        },
    )
}

proptest! {
    #[test]
    fn vectorize_roundtrip_identity(img in image_strategy(12, -5.0, 5.0)) {
        let v = vectorize(&img);
        prop_assert_eq!(v.len(), img.rows() * img.cols());
        let back = devectorize(&v, img.rows(), img.cols()).unwrap();
        prop_assert_eq!(back, img);
    }

    #[test]
    fn sandwich_holds_with_full_window_candidate((img, w) in pooled_image_strategy()) {
        let g = make_grid(img.rows(), img.cols(), w, w).unwrap();
        let cfg = MaxfunConfig::centered(1, (w - 1) / 2);
        let avg = pool_avg(&img, &g).unwrap().values;
        let mf = pool_maxfun(&img, &g, &cfg).unwrap().values;
        let max = pool_max(&img, &g).unwrap().values;
        for ((&a, &m), &x) in avg.data().iter().zip(mf.data()).zip(max.data()) {
            prop_assert!(a - m <= 1e-12, "avg {a} > maxfun {m}");
            prop_assert!(m - x <= 1e-12, "maxfun {m} > max {x}");
        }
    }

    #[test]
    fn maxfun_is_nonexpansive((img, w) in pooled_image_strategy(),
                              seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let partner = Image::from_fn(img.rows(), img.cols(), |i, j| {
            (img.get(i, j) + rng.gen_range(-0.5..2.0)).max(0.0)
        });
        let g = make_grid(img.rows(), img.cols(), w, w).unwrap();
        let cfg = MaxfunConfig::centered(1, (w - 1) / 2);
        let p = pool_maxfun(&img, &g, &cfg).unwrap().values;
        let q = pool_maxfun(&partner, &g, &cfg).unwrap().values;
        let lhs = maxfun_core::mat::dist_sq(p.data(), q.data()).sqrt();
        let rhs = maxfun_core::mat::dist_sq(img.data(), partner.data()).sqrt();
        prop_assert!(lhs <= rhs + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn stochastic_and_mixed_stay_sandwiched((img, w) in pooled_image_strategy(),
                                            alpha in 0.0f64..1.0) {
        // shift strictly positive so every window has a positive entry
        let img = Image::from_fn(img.rows(), img.cols(), |i, j| img.get(i, j) + 1e-3);
        let g = make_grid(img.rows(), img.cols(), w, w).unwrap();
        let avg = pool_avg(&img, &g).unwrap().values;
        let max = pool_max(&img, &g).unwrap().values;
        let sto = pool_stochastic(&img, &g).unwrap().values;
        let mixed = pool_mixed(&img, &g, alpha).unwrap().values;
        for i in 0..avg.data().len() {
            prop_assert!(avg.data()[i] - sto.data()[i] <= 1e-12);
            prop_assert!(sto.data()[i] - max.data()[i] <= 1e-12);
            prop_assert!(avg.data()[i] - mixed.data()[i] <= 1e-12);
            prop_assert!(mixed.data()[i] - max.data()[i] <= 1e-12);
        }
    }

    #[test]
    fn stripe_sparsity_bounds_and_rotation(n in 2usize..10,
                                           n0 in 1usize..4,
                                           m1 in 1usize..4,
                                           seed in 0u64..500,
                                           rot in 0usize..10) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..n * m1)
            .map(|_| if rng.gen_bool(0.3) { rng.gen_range(0.1..2.0) } else { 0.0 })
            .collect();
        let code = SparseCode::new(values.clone(), n0, m1).unwrap();
        prop_assert!(code.l0_inf() <= code.l0());
        let mut rotated = values;
        rotated.rotate_left((rot % n) * m1);
        let rotated = SparseCode::new(rotated, n0, m1).unwrap();
        prop_assert_eq!(code.l0_inf(), rotated.l0_inf());
    }
}
