//! Built-in verification suites.
//!
//! Each suite runs seeded trials of one invariant and reports a failure
//! count; the CLI `selftest` command prints one line per suite and the
//! acceptance tests bind the counts to their tolerances. Naive-loop
//! cross-checks come from [`crate::pooling::reference`], which shares no
//! code with the production operators.

use crate::csc::{
    epsilon_recursion, mutual_coherence, verify_stability, ConvDictionary, DcppModel, LayerSpec,
    MuConvention, Pool1dSpec, SolverKind, TrialConfig,
};
use crate::mat::{frob_norm, Image, Matrix};
use crate::pooling::{
    make_grid, make_grid_1d, pool_avg, pool_max, pool_maxfun, pool_maxfun_1d, pool_mixed,
    pool_stochastic, reference, MaxfunConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::{Duration, Instant};

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub elapsed: Duration,
    /// First failure description, when any.
    pub detail: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{:<26} {:>7} trials  {:>3} failures  {:>10.2?}  {}",
            self.name,
            self.trials,
            self.failures,
            self.elapsed,
            if self.passed() { "ok" } else { "FAIL" }
        )
    }
}

fn run_suite(
    name: &'static str,
    trials: usize,
    check: impl Fn(u64) -> Option<String> + Sync,
) -> SuiteResult {
    let start = Instant::now();
    let failures: Vec<String> = (0..trials as u64)
        .into_par_iter()
        .filter_map(|seed| check(seed))
        .collect();
    SuiteResult {
        name,
        trials,
        failures: failures.len(),
        elapsed: start.elapsed(),
        detail: failures.into_iter().next().unwrap_or_default(),
    }
}

fn random_image(rng: &mut ChaCha8Rng, rows: usize, cols: usize, hi: f64) -> Image<f64> {
    Image::from_fn(rows, cols, |_, _| rng.gen_range(0.0..hi))
}

/// All six operators against their naive references, bit for bit, in both
/// grid regimes, on inputs up to 32x32.
pub fn suite_oracle_equivalence(trials: usize) -> SuiteResult {
    run_suite("oracle-equivalence", trials, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0EAC + seed);
        let shapes = [
            (9usize, 9usize, 3usize, 3usize),
            (32, 32, 7, 7),
            (21, 27, 5, 5),
            (32, 32, 7, 4),
            (16, 12, 5, 3),
            (27, 21, 9, 5),
        ];
        let (rows, cols, w, s) = shapes[seed as usize % shapes.len()];
        let x = random_image(&mut rng, rows, cols, 10.0);
        let g = match make_grid(rows, cols, w, s) {
            Ok(g) => g,
            Err(e) => return Some(format!("grid: {e}")),
        };
        let bits =
            |img: &Image<f64>| -> Vec<u64> { img.data().iter().map(|v| v.to_bits()).collect() };

        let checks: Vec<(&str, Image<f64>, Image<f64>)> = vec![
            (
                "avg",
                pool_avg(&x, &g).unwrap().values,
                reference::naive_avg(&x, &g),
            ),
            (
                "max",
                pool_max(&x, &g).unwrap().values,
                reference::naive_max(&x, &g),
            ),
            (
                "mixed",
                pool_mixed(&x, &g, 0.41).unwrap().values,
                reference::naive_mixed(&x, &g, 0.41),
            ),
            (
                "stochastic",
                pool_stochastic(&x, &g).unwrap().values,
                reference::naive_stochastic(&x, &g),
            ),
        ];
        for (name, got, want) in checks {
            if bits(&got) != bits(&want) {
                return Some(format!("seed {seed}: {name} diverged from naive loop"));
            }
        }
        let b = ((w - 1) / 2).max(1);
        let mut cfgs = vec![MaxfunConfig::non_centered(1, b)];
        if w % 2 == 1 {
            cfgs.push(MaxfunConfig::centered(1, b));
            if b >= 2 {
                cfgs.push(MaxfunConfig::centered(2, b));
            }
        }
        for cfg in cfgs {
            let got = pool_maxfun(&x, &g, &cfg).unwrap().values;
            let want = reference::naive_maxfun(&x, &g, &cfg).unwrap();
            if bits(&got) != bits(&want) {
                return Some(format!("seed {seed}: maxfun {cfg:?} diverged"));
            }
        }
        None
    })
}

/// Per-cell `avg <= maxfun <= max` with the full window among the
/// candidates (2b + 1 = window), on random 63x63 images.
pub fn suite_sandwich(trials: usize) -> SuiteResult {
    run_suite("sandwich-inequality", trials, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5A5D + seed);
        let x = random_image(&mut rng, 63, 63, 1.0);
        let g = make_grid(63, 63, 7, 7).unwrap();
        let cfg = MaxfunConfig::centered(1, 3);
        let avg = pool_avg(&x, &g).unwrap().values;
        let mf = pool_maxfun(&x, &g, &cfg).unwrap().values;
        let max = pool_max(&x, &g).unwrap().values;
        for k in 0..g.out_rows {
            for l in 0..g.out_cols {
                if avg.get(k, l) - mf.get(k, l) > 1e-12 {
                    return Some(format!(
                        "seed {seed} cell ({k},{l}): avg {} > maxfun {}",
                        avg.get(k, l),
                        mf.get(k, l)
                    ));
                }
                if mf.get(k, l) - max.get(k, l) > 1e-12 {
                    return Some(format!(
                        "seed {seed} cell ({k},{l}): maxfun {} > max {}",
                        mf.get(k, l),
                        max.get(k, l)
                    ));
                }
            }
        }
        None
    })
}

/// Make an argmax-flipping partner: mass added on the radius-`b` shell of
/// every window, pushing the winning radius outward.
fn flip_partner_2d(
    x: &Image<f64>,
    g: &crate::pooling::PoolGrid,
    b: usize,
    bump: f64,
) -> Image<f64> {
    let mut partner = x.clone();
    for k in 0..g.out_rows {
        for l in 0..g.out_cols {
            let (ci, cj) = g.center(k, l);
            for di in 0..=2 * b {
                for dj in 0..=2 * b {
                    if di.max(dj) == 2 * b || di.min(dj) == 0 {
                        let (i, j) = (ci + di - b, cj + dj - b);
                        partner.set(i, j, partner.get(i, j) + bump);
                    }
                }
            }
        }
    }
    partner
}

/// 2-D non-expansiveness over random and adversarial pairs.
pub fn suite_nonexpansive_2d(trials: usize) -> SuiteResult {
    run_suite("non-expansive-2d", trials, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x2D + seed);
        let setups = [
            (21usize, 21usize, 7usize),
            (12, 18, 3),
            (25, 35, 5),
            (27, 9, 9),
        ];
        let (rows, cols, w) = setups[seed as usize % setups.len()];
        let g = make_grid(rows, cols, w, w).unwrap();
        let b_max = ((w - 1) / 2).max(1);
        let b = 1 + seed as usize % b_max;
        let r_min = 1 + seed as usize % b;
        let cfg = MaxfunConfig::centered(r_min, b);

        let x = random_image(&mut rng, rows, cols, 5.0);
        let partner = match seed % 5 {
            0 => random_image(&mut rng, rows, cols, 5.0),
            1 => {
                // sparse spikes
                let mut p = x.clone();
                for _ in 0..4 {
                    let i = rng.gen_range(0..rows);
                    let j = rng.gen_range(0..cols);
                    p.set(i, j, p.get(i, j) + rng.gen_range(0.0..8.0));
                }
                p
            }
            2 => flip_partner_2d(&x, &g, b, rng.gen_range(0.5..4.0)),
            3 => x.clone(),
            _ => {
                let c = rng.gen_range(0.0..2.0);
                Image::from_fn(rows, cols, |i, j| x.get(i, j) + c)
            }
        };

        let p = pool_maxfun(&x, &g, &cfg).unwrap().values;
        let q = pool_maxfun(&partner, &g, &cfg).unwrap().values;
        let lhs = crate::mat::dist_sq(p.data(), q.data()).sqrt();
        let rhs = crate::mat::dist_sq(x.data(), partner.data()).sqrt();
        (lhs - rhs > 1e-12).then(|| format!("seed {seed}: ||P-P^|| = {lhs} > ||X-X^|| = {rhs}"))
    })
}

/// 1-D per-channel non-expansiveness over random and adversarial pairs.
pub fn suite_nonexpansive_1d(trials: usize) -> SuiteResult {
    run_suite("non-expansive-1d", trials, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1D + seed);
        let setups = [(60usize, 5usize, 2usize), (45, 9, 3), (30, 3, 1), (63, 7, 2)];
        let (len, w, channels) = setups[seed as usize % setups.len()];
        let g = make_grid_1d(len, w, w).unwrap();
        let b_max = ((w - 1) / 2).max(1);
        let b = 1 + seed as usize % b_max;
        let cfg = MaxfunConfig::centered(1, b);

        let x: Vec<f64> = (0..len * channels).map(|_| rng.gen_range(0.0..5.0)).collect();
        let partner: Vec<f64> = match seed % 4 {
            0 => (0..len * channels).map(|_| rng.gen_range(0.0..5.0)).collect(),
            1 => x.clone(),
            2 => {
                // shell bump at radius b around each window center
                let mut p = x.clone();
                for k in 0..g.out_len {
                    let c = g.center(k);
                    for ch in 0..channels {
                        let bump = rng.gen_range(0.5..4.0);
                        p[(c - b) * channels + ch] += bump;
                        p[(c + b) * channels + ch] += bump;
                    }
                }
                p
            }
            _ => x.iter().map(|v| v + 0.75).collect(),
        };

        let p = pool_maxfun_1d(&x, channels, &g, &cfg).unwrap();
        let q = pool_maxfun_1d(&partner, channels, &g, &cfg).unwrap();
        let lhs = crate::mat::dist_sq(&p, &q).sqrt();
        let rhs = crate::mat::dist_sq(&x, &partner).sqrt();
        (lhs - rhs > 1e-12).then(|| format!("seed {seed}: ||P-P^|| = {lhs} > ||X-X^|| = {rhs}"))
    })
}

/// `r_min = b` with `2b + 1 = window` collapses maxfun to the window mean.
pub fn suite_degenerate_identity(trials: usize) -> SuiteResult {
    run_suite("degenerate-identity", trials, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(0xDE6 + seed);
        let windows = [3usize, 5, 7, 9];
        let w = windows[seed as usize % windows.len()];
        let rows = w * (1 + seed as usize % 4);
        let cols = w * (2 + seed as usize % 3);
        let x = random_image(&mut rng, rows, cols, 3.0);
        let g = make_grid(rows, cols, w, w).unwrap();
        let b = (w - 1) / 2;
        let mf = pool_maxfun(&x, &g, &MaxfunConfig::centered(b, b))
            .unwrap()
            .values;
        let avg = pool_avg(&x, &g).unwrap().values;
        let same = mf
            .data()
            .iter()
            .zip(avg.data())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        (!same).then(|| format!("seed {seed}: degenerate maxfun differs from avg"))
    })
}

/// Remaining order relations: stochastic and mixed sandwiches, the maxfun
/// upper bound for every config, and monotonicity of the five monotone
/// operators.
pub fn suite_pooling_bounds(trials: usize) -> SuiteResult {
    run_suite("pooling-bounds", trials, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB0D + seed);
        let (rows, cols, w, s) = if seed % 2 == 0 {
            (15usize, 15usize, 5usize, 5usize)
        } else {
            (15, 15, 5, 3)
        };
        let g = make_grid(rows, cols, w, s).unwrap();
        // keep entries strictly positive so stochastic windows are nonzero
        let x = Image::from_fn(rows, cols, |_, _| rng.gen_range(1e-3..4.0));
        let avg = pool_avg(&x, &g).unwrap().values;
        let max = pool_max(&x, &g).unwrap().values;
        let sto = pool_stochastic(&x, &g).unwrap().values;
        let tol = 1e-12;
        for (k, (&a, (&m, &t))) in avg
            .data()
            .iter()
            .zip(max.data().iter().zip(sto.data()))
            .enumerate()
        {
            if a - t > tol || t - m > tol {
                return Some(format!("seed {seed}: stochastic sandwich broke at cell {k}"));
            }
        }
        for alpha in [0.0, 0.3, 0.7, 1.0] {
            let mixed = pool_mixed(&x, &g, alpha).unwrap().values;
            for (k, (&v, (&a, &m))) in mixed
                .data()
                .iter()
                .zip(avg.data().iter().zip(max.data()))
                .enumerate()
            {
                if a - v > tol || v - m > tol {
                    return Some(format!(
                        "seed {seed}: mixed sandwich broke at cell {k}, alpha {alpha}"
                    ));
                }
            }
        }
        for cfg in [
            MaxfunConfig::centered(1, 2),
            MaxfunConfig::centered(2, 2),
            MaxfunConfig::non_centered(1, 2),
        ] {
            let mf = pool_maxfun(&x, &g, &cfg).unwrap().values;
            for (k, (&v, &m)) in mf.data().iter().zip(max.data()).enumerate() {
                if v - m > tol {
                    return Some(format!(
                        "seed {seed}: maxfun exceeded max at cell {k} under {cfg:?}"
                    ));
                }
            }
        }
        // monotonicity under a non-negative bump
        let bumped = Image::from_fn(rows, cols, |i, j| {
            x.get(i, j) + if (i + j + seed as usize) % 3 == 0 { 0.5 } else { 0.0 }
        });
        let pairs: Vec<(&str, Image<f64>, Image<f64>)> = vec![
            ("avg", avg, pool_avg(&bumped, &g).unwrap().values),
            ("max", max, pool_max(&bumped, &g).unwrap().values),
            (
                "mixed",
                pool_mixed(&x, &g, 0.5).unwrap().values,
                pool_mixed(&bumped, &g, 0.5).unwrap().values,
            ),
            (
                "maxfun",
                pool_maxfun(&x, &g, &MaxfunConfig::centered(1, 2))
                    .unwrap()
                    .values,
                pool_maxfun(&bumped, &g, &MaxfunConfig::centered(1, 2))
                    .unwrap()
                    .values,
            ),
            (
                "maxfun-nc",
                pool_maxfun(&x, &g, &MaxfunConfig::non_centered(1, 2))
                    .unwrap()
                    .values,
                pool_maxfun(&bumped, &g, &MaxfunConfig::non_centered(1, 2))
                    .unwrap()
                    .values,
            ),
        ];
        for (name, lo, hi) in pairs {
            for (k, (&l, &h)) in lo.data().iter().zip(hi.data()).enumerate() {
                if l - h > tol {
                    return Some(format!("seed {seed}: {name} not monotone at cell {k}"));
                }
            }
        }
        None
    })
}

/// Two-layer stability model over signal length `n1` (a multiple of 5).
pub fn stability_model(n1: usize) -> DcppModel {
    let d1 = ConvDictionary::build(&Matrix::from_cols(2, &[vec![1.0, 0.2]]).unwrap(), n1)
        .expect("layer-1 dictionary");
    let n2 = n1 / 5;
    let d2 = ConvDictionary::build(&Matrix::from_cols(2, &[vec![1.0, 0.18]]).unwrap(), n2)
        .expect("layer-2 dictionary");
    DcppModel::new(vec![
        LayerSpec {
            dict: d1,
            pool: Pool1dSpec {
                window: 5,
                stride: 5,
                cfg: MaxfunConfig::centered(1, 2),
            },
            lambda: 1,
            eps: 0.0,
        },
        LayerSpec {
            dict: d2,
            pool: Pool1dSpec {
                window: 3,
                stride: 3,
                cfg: MaxfunConfig::centered(1, 1),
            },
            lambda: 1,
            eps: 0.0,
        },
    ])
    .expect("two-layer model")
}

/// Oracle-solver stability trials on two-layer models with signal length
/// alternating between 32 and 64; both theorem inequalities must hold in
/// every (trial, layer) pair.
pub fn suite_stability(trials: usize) -> SuiteResult {
    let model32 = stability_model(32);
    let model64 = stability_model(64);
    for m in [&model32, &model64] {
        for layer in m.layers() {
            assert!(layer.dict.mu() <= 0.2, "dictionary coherence out of spec");
        }
    }
    run_suite("stability-theorem", trials, move |seed| {
        let model = if seed % 2 == 0 { &model32 } else { &model64 };
        let trial = TrialConfig {
            seed,
            eps0: 0.05,
            solver: SolverKind::Oracle,
            mu_convention: MuConvention::PerLayer,
            amp_range: (1.0, 2.0),
        };
        match verify_stability(model, &trial) {
            Ok(report) => (!report.all_pass()).then(|| {
                format!(
                    "seed {seed}: {:?}",
                    report.layers.iter().filter(|l| !l.pass).collect::<Vec<_>>()
                )
            }),
            Err(e) => Some(format!("seed {seed}: {e}")),
        }
    })
}

/// Budget-recursion arithmetic and mutual-coherence brute-force checks.
pub fn suite_recursion_and_coherence(dicts: usize) -> SuiteResult {
    run_suite("recursion-coherence", dicts + 2, |seed| {
        if seed == 0 {
            // direct substitution: eps0 = 0.1, lambda 1, mu 0.5 -> 0.08
            let out = epsilon_recursion(0.1, &[1], &[0.5]).unwrap();
            return ((out[0] - 0.08).abs() > 1e-15)
                .then(|| format!("recursion gave {}, want 0.08", out[0]));
        }
        if seed == 1 {
            // orthogonal case: eps doubles per layer, exactly
            let out = epsilon_recursion(0.7, &[3, 2, 9], &[0.0, 0.0, 0.0]).unwrap();
            let mut prev = 0.7f64;
            for &e_sq in &out {
                let e = e_sq.sqrt();
                if e != 2.0 * prev {
                    return Some(format!("doubling law broke: {e} vs {}", 2.0 * prev));
                }
                prev = e;
            }
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0 + seed);
        let rows = rng.gen_range(6..12);
        let cols_n = rng.gen_range(4..20);
        let cols: Vec<Vec<f64>> = (0..cols_n)
            .map(|_| (0..rows).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        if cols.iter().any(|c| frob_norm(c) == 0.0) {
            return None; // astronomically unlikely; skip rather than fail
        }
        let d = Matrix::from_cols(rows, &cols).unwrap();
        let got = mutual_coherence(&d).unwrap();
        // independent route: normalize first, then take the max |dot|
        let unit: Vec<Vec<f64>> = cols
            .iter()
            .map(|c| {
                let n = frob_norm(c);
                c.iter().map(|v| v / n).collect()
            })
            .collect();
        let mut brute: f64 = 0.0;
        for i in 0..cols_n {
            for j in 0..cols_n {
                if i != j {
                    let dot: f64 = unit[i].iter().zip(&unit[j]).map(|(a, b)| a * b).sum();
                    brute = brute.max(dot.abs());
                }
            }
        }
        let id_mu = mutual_coherence(&Matrix::<f64>::identity(rows)).unwrap();
        if id_mu != 0.0 {
            return Some(format!("identity coherence {id_mu} != 0"));
        }
        ((got - brute).abs() > 1e-14)
            .then(|| format!("seed {seed}: coherence {got} vs brute {brute}"))
    })
}

/// Standard counts for the CLI selftest command.
pub fn run_all() -> Vec<SuiteResult> {
    vec![
        suite_oracle_equivalence(100),
        suite_sandwich(1000),
        suite_nonexpansive_2d(10_000),
        suite_nonexpansive_1d(10_000),
        suite_degenerate_identity(100),
        suite_pooling_bounds(200),
        suite_stability(100),
        suite_recursion_and_coherence(50),
    ]
}
