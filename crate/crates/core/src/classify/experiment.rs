//! The pooling-comparison experiment: pooled features, one linear SVM per
//! strategy, fold-validated hyperparameters, and the results table.

use crate::classify::cv::{fold_mean_accuracy, kfold_select, CvPlan};
use crate::classify::features::{extract_features, pool_tensor, FeatureTensor, FilterBank, PoolMethod};
use crate::classify::svm::{accuracy, svm_predict, svm_train, SvmParams};
use crate::error::{Error, Result};
use crate::mat::Image;
use crate::pooling::{make_grid, MaxfunConfig, PoolGrid};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The six pooling strategies, in results-table row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Average,
    Maximum,
    Mixed,
    Stochastic,
    Maxfun,
    CenteredMaxfun,
}

impl Strategy {
    pub const TABLE_ORDER: [Strategy; 6] = [
        Strategy::Average,
        Strategy::Maximum,
        Strategy::Mixed,
        Strategy::Stochastic,
        Strategy::Maxfun,
        Strategy::CenteredMaxfun,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Average => "average",
            Strategy::Maximum => "maximum",
            Strategy::Mixed => "mixed",
            Strategy::Stochastic => "stochastic",
            Strategy::Maxfun => "maxfun",
            Strategy::CenteredMaxfun => "centered maxfun",
        }
    }

    /// Concrete operator for one hyperparameter value (ignored by the
    /// parameter-free strategies).
    pub fn method(self, hyper: f64, max_radius: usize) -> PoolMethod {
        match self {
            Strategy::Average => PoolMethod::Average,
            Strategy::Maximum => PoolMethod::Maximum,
            Strategy::Mixed => PoolMethod::Mixed { alpha: hyper },
            Strategy::Stochastic => PoolMethod::Stochastic,
            Strategy::Maxfun => PoolMethod::Maxfun {
                cfg: MaxfunConfig::non_centered(hyper as usize, max_radius),
            },
            Strategy::CenteredMaxfun => PoolMethod::Maxfun {
                cfg: MaxfunConfig::centered(hyper as usize, max_radius),
            },
        }
    }
}

/// Window/stride pair; `stride == window` partitions the spatial domain,
/// `stride < window` overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRegime {
    pub window: usize,
    pub stride: usize,
}

impl GridRegime {
    pub fn kind(&self) -> &'static str {
        if self.stride == self.window {
            "partition"
        } else if self.stride < self.window {
            "overlap"
        } else {
            "gapped"
        }
    }
}

/// Experiment parameters (everything downstream of feature extraction).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    pub regimes: Vec<GridRegime>,
    /// Maxfun radius bound `b` shared by both maxfun strategies.
    pub max_radius: usize,
    pub alpha_grid: Vec<f64>,
    pub r_min_grid: Vec<usize>,
    pub test_fraction: f64,
    pub split_seed: u64,
    pub cv_k: usize,
    pub cv_seed: u64,
    pub svm: SvmParams,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
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
            svm: SvmParams::default(),
        }
    }
}

impl ComparisonConfig {
    pub fn validate(&self) -> Result<()> {
        if self.regimes.is_empty() {
            return Err(Error::InvalidConfig("at least one grid regime required".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "test fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.alpha_grid.is_empty() || self.r_min_grid.is_empty() {
            return Err(Error::InvalidConfig("hyperparameter grids must be non-empty".into()));
        }
        if self.alpha_grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidConfig("alpha grid values must lie in [0, 1]".into()));
        }
        if self.r_min_grid.iter().any(|&r| r < 1 || r > self.max_radius) {
            return Err(Error::InvalidConfig(format!(
                "r_min grid values must lie in [1, {}]",
                self.max_radius
            )));
        }
        if self.cv_k < 2 {
            return Err(Error::InvalidConfig("cv_k must be >= 2".into()));
        }
        for regime in &self.regimes {
            // both maxfun variants must be valid on every regime
            MaxfunConfig::centered(1, self.max_radius).validate(regime.window)?;
        }
        Ok(())
    }
}

/// Extracted features for a labeled image set.
#[derive(Debug, Clone)]
pub struct FeatureDataset {
    pub tensors: Vec<FeatureTensor>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl FeatureDataset {
    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tensors.len() != self.labels.len() {
            return Err(Error::Dataset(format!(
                "{} tensors vs {} labels",
                self.tensors.len(),
                self.labels.len()
            )));
        }
        if self.class_names.len() < 2 {
            return Err(Error::Dataset("need at least two classes".into()));
        }
        if self.labels.iter().any(|&l| l >= self.class_names.len()) {
            return Err(Error::Dataset("label index out of range".into()));
        }
        let (h, w) = match self.tensors.first() {
            Some(t) => (t.height(), t.width()),
            None => return Err(Error::Dataset("empty dataset".into())),
        };
        let c = self.tensors[0].channels();
        for t in &self.tensors {
            if t.height() != h || t.width() != w || t.channels() != c {
                return Err(Error::Dataset("feature tensors have mixed shapes".into()));
            }
        }
        Ok(())
    }
}

/// Run the filter bank over every image, in parallel.
pub fn extract_dataset(images: &[Image<f64>], bank: &FilterBank) -> Result<Vec<FeatureTensor>> {
    images
        .par_iter()
        .map(|img| extract_features(img, bank))
        .collect()
}

/// One selected result.
#[derive(Debug, Clone)]
pub struct StrategyRow {
    pub strategy: Strategy,
    pub window: usize,
    pub stride: usize,
    /// Selected hyperparameter (alpha or r_min), when the strategy has one.
    pub hyperparam: Option<f64>,
    pub accuracy: f64,
}

/// Fold-level log entry, recorded uniformly for every strategy.
#[derive(Debug, Clone)]
pub struct CvLogRow {
    pub strategy: Strategy,
    pub window: usize,
    pub stride: usize,
    pub hyperparam: Option<f64>,
    pub mean_validation_accuracy: f64,
}

/// Full experiment output.
#[derive(Debug, Clone)]
pub struct ComparisonTable {
    pub rows: Vec<StrategyRow>,
    pub cv_log: Vec<CvLogRow>,
    pub train_size: usize,
    pub test_size: usize,
}

impl ComparisonTable {
    /// CSV with columns `strategy,window,stride,hyperparam,accuracy`.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::from("strategy,window,stride,hyperparam,accuracy\n");
        for r in &self.rows {
            let hyper = r.hyperparam.map(|h| h.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{}",
                r.strategy.label(),
                r.window,
                r.stride,
                hyper,
                r.accuracy
            )
            .expect("string write");
        }
        out
    }

    /// Aligned text table, strategies as rows and regimes as columns.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut regimes: Vec<(usize, usize)> = Vec::new();
        for r in &self.rows {
            if !regimes.contains(&(r.window, r.stride)) {
                regimes.push((r.window, r.stride));
            }
        }
        let mut out = String::new();
        writeln!(
            out,
            "SVM accuracy by pooling strategy ({} train / {} test)",
            self.train_size, self.test_size
        )
        .unwrap();
        writeln!(
            out,
            "w = window, s = stride; windows partition the input when s = w and overlap when s < w"
        )
        .unwrap();
        write!(out, "{:<18}", "strategy").unwrap();
        for (w, s) in &regimes {
            let kind = if s == w { "partition" } else { "overlap" };
            write!(out, "{:>22}", format!("(w={w}, s={s}) {kind}")).unwrap();
        }
        out.push('\n');
        let width = 18 + 22 * regimes.len();
        writeln!(out, "{}", "-".repeat(width)).unwrap();
        for strategy in Strategy::TABLE_ORDER {
            write!(out, "{:<18}", strategy.label()).unwrap();
            for &(w, s) in &regimes {
                let cell = self
                    .rows
                    .iter()
                    .find(|r| r.strategy == strategy && r.window == w && r.stride == s);
                match cell {
                    Some(r) => {
                        let text = match (strategy, r.hyperparam) {
                            (Strategy::Mixed, Some(a)) => format!("{:.4} (a={a})", r.accuracy),
                            (Strategy::Maxfun | Strategy::CenteredMaxfun, Some(rm)) => {
                                format!("{:.4} (r={rm})", r.accuracy)
                            }
                            _ => format!("{:.4}", r.accuracy),
                        };
                        write!(out, "{text:>22}").unwrap();
                    }
                    None => write!(out, "{:>22}", "-").unwrap(),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Grid of hyperparameter values a strategy searches over.
fn hyper_grid(strategy: Strategy, cfg: &ComparisonConfig) -> Vec<Option<f64>> {
    match strategy {
        Strategy::Mixed => cfg.alpha_grid.iter().map(|&a| Some(a)).collect(),
        Strategy::Maxfun | Strategy::CenteredMaxfun => {
            cfg.r_min_grid.iter().map(|&r| Some(r as f64)).collect()
        }
        _ => vec![None],
    }
}

/// Pooled feature rows for every sample, scaled to unit Euclidean norm
/// (zero rows stay zero) so the hinge margins are scale-free.
fn pooled_features_for_all(
    ds: &FeatureDataset,
    grid: &PoolGrid,
    method: &PoolMethod,
) -> Result<Vec<Vec<f64>>> {
    ds.tensors
        .par_iter()
        .map(|t| {
            let mut row = pool_tensor(t, grid, method)?;
            let norm = crate::mat::frob_norm(&row);
            if norm > 0.0 {
                for v in &mut row {
                    *v /= norm;
                }
            }
            Ok(row)
        })
        .collect()
}

/// Train on the train rows of `features`, report accuracy on the test rows.
fn holdout_accuracy(
    features: &[Vec<f64>],
    labels: &[usize],
    train_idx: &[usize],
    test_idx: &[usize],
    svm: &SvmParams,
) -> Result<f64> {
    let train_x: Vec<Vec<f64>> = train_idx.iter().map(|&i| features[i].clone()).collect();
    let train_y: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
    let test_x: Vec<Vec<f64>> = test_idx.iter().map(|&i| features[i].clone()).collect();
    let test_y: Vec<usize> = test_idx.iter().map(|&i| labels[i]).collect();
    let model = svm_train(&train_x, &train_y, svm)?;
    let pred = svm_predict(&model, &test_x)?;
    Ok(accuracy(&pred, &test_y))
}

/// Accuracy of a single fixed pooling operator under the experiment's
/// split and SVM settings. Used to probe individual table cells.
pub fn evaluate_method(
    ds: &FeatureDataset,
    regime: GridRegime,
    method: &PoolMethod,
    train_idx: &[usize],
    test_idx: &[usize],
    svm: &SvmParams,
) -> Result<f64> {
    ds.validate()?;
    let grid = make_grid(
        ds.tensors[0].height(),
        ds.tensors[0].width(),
        regime.window,
        regime.stride,
    )?;
    let features = pooled_features_for_all(ds, &grid, method)?;
    holdout_accuracy(&features, &ds.labels, train_idx, test_idx, svm)
}

/// Run the full comparison: every strategy on every regime, with k-fold
/// hyperparameter selection on the training split.
pub fn run_pooling_comparison(ds: &FeatureDataset, cfg: &ComparisonConfig) -> Result<ComparisonTable> {
    cfg.validate()?;
    ds.validate()?;
    let n = ds.len();
    let (train_idx, test_idx) = crate::io::split_indices(n, cfg.test_fraction, cfg.split_seed)?;
    let train_labels: Vec<usize> = train_idx.iter().map(|&i| ds.labels[i]).collect();

    let mut rows = Vec::new();
    let mut cv_log = Vec::new();
    for strategy in Strategy::TABLE_ORDER {
        for regime in &cfg.regimes {
            let grid = make_grid(
                ds.tensors[0].height(),
                ds.tensors[0].width(),
                regime.window,
                regime.stride,
            )?;
            let hypers = hyper_grid(strategy, cfg);
            // pooled features for every sample, one set per grid value
            let mut candidate_all: Vec<Vec<Vec<f64>>> = Vec::with_capacity(hypers.len());
            for hyper in &hypers {
                let method = strategy.method(hyper.unwrap_or(0.0), cfg.max_radius);
                candidate_all.push(pooled_features_for_all(ds, &grid, &method)?);
            }
            let plan = CvPlan {
                k: cfg.cv_k,
                seed: cfg.cv_seed,
            };
            let chosen = if hypers.len() == 1 {
                // log the single fold-validated value uniformly
                let train_view: Vec<Vec<f64>> =
                    train_idx.iter().map(|&i| candidate_all[0][i].clone()).collect();
                let mean = fold_mean_accuracy(&plan, &train_view, &train_labels, &cfg.svm)?;
                cv_log.push(CvLogRow {
                    strategy,
                    window: regime.window,
                    stride: regime.stride,
                    hyperparam: None,
                    mean_validation_accuracy: mean,
                });
                0
            } else {
                let candidate_train: Vec<Vec<Vec<f64>>> = candidate_all
                    .iter()
                    .map(|feats| train_idx.iter().map(|&i| feats[i].clone()).collect())
                    .collect();
                let (best, means) = kfold_select(&plan, &candidate_train, &train_labels, &cfg.svm)?;
                for (h, m) in hypers.iter().zip(&means) {
                    cv_log.push(CvLogRow {
                        strategy,
                        window: regime.window,
                        stride: regime.stride,
                        hyperparam: *h,
                        mean_validation_accuracy: *m,
                    });
                }
                best
            };
            let acc = holdout_accuracy(
                &candidate_all[chosen],
                &ds.labels,
                &train_idx,
                &test_idx,
                &cfg.svm,
            )?;
            rows.push(StrategyRow {
                strategy,
                window: regime.window,
                stride: regime.stride,
                hyperparam: hypers[chosen],
                accuracy: acc,
            });
        }
    }
    Ok(ComparisonTable {
        rows,
        cv_log,
        train_size: train_idx.len(),
        test_size: test_idx.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::cv::{kfold_select, CvPlan};
    use crate::mat::Image;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Single-window images where only the window max separates the
    /// classes: class 0 caps at exactly 1.0 with a wildly noisy mean,
    /// class 1 is constant below 1.0 with an overlapping mean.
    fn max_signal_images() -> (Vec<Image<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut images = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..15 {
            let beta: f64 = rng.gen_range(0.0..0.95);
            let mut spiked = Image::constant(7, 7, beta);
            spiked.set(3, 3, 1.0);
            images.push(spiked);
            labels.push(0);
            let c: f64 = rng.gen_range(0.02..0.9);
            images.push(Image::constant(7, 7, c));
            labels.push(1);
        }
        (images, labels)
    }

    #[test]
    fn planted_max_signal_selects_alpha_one() {
        let (images, labels) = max_signal_images();
        let grid = make_grid(7, 7, 7, 7).unwrap();
        let alphas = [0.2, 0.6, 1.0];
        let candidates: Vec<Vec<Vec<f64>>> = alphas
            .iter()
            .map(|&alpha| {
                images
                    .iter()
                    .map(|img| {
                        let t = FeatureTensor::new(1, 7, 7, img.data().to_vec()).unwrap();
                        pool_tensor(&t, &grid, &PoolMethod::Mixed { alpha }).unwrap()
                    })
                    .collect()
            })
            .collect();
        let plan = CvPlan { k: 3, seed: 2 };
        let svm = SvmParams {
            reg_c: 50.0,
            epochs: 60,
            seed: 4,
        };
        let (best, means) = kfold_select(&plan, &candidates, &labels, &svm).unwrap();
        assert_eq!(alphas[best], 1.0, "means were {means:?}");
        assert!(means[2] > means[0] && means[2] > means[1], "{means:?}");
    }

    fn tiny_dataset(images: &[Image<f64>], labels: Vec<usize>, classes: usize) -> FeatureDataset {
        let bank = FilterBank::oriented_plus_random(3);
        FeatureDataset {
            tensors: extract_dataset(images, &bank).unwrap(),
            labels,
            class_names: (0..classes).map(|c| format!("class_{c}")).collect(),
        }
    }

    fn tiny_config() -> ComparisonConfig {
        ComparisonConfig {
            regimes: vec![
                GridRegime { window: 5, stride: 5 },
                GridRegime { window: 5, stride: 3 },
            ],
            max_radius: 2,
            alpha_grid: vec![0.25, 0.75],
            r_min_grid: vec![1, 2],
            test_fraction: 0.4,
            split_seed: 8,
            cv_k: 3,
            cv_seed: 9,
            svm: SvmParams {
                reg_c: 10.0,
                epochs: 15,
                seed: 6,
            },
        }
    }

    #[test]
    fn identical_images_sit_at_chance() {
        let img = Image::constant(22, 22, 0.5);
        let images: Vec<Image<f64>> = (0..40).map(|_| img.clone()).collect();
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let ds = tiny_dataset(&images, labels, 2);
        let table = run_pooling_comparison(&ds, &tiny_config()).unwrap();
        // no signal: accuracy within the 3-sigma binomial band around 0.5
        let sigma = (0.25f64 / table.test_size as f64).sqrt();
        for row in &table.rows {
            assert!(
                (row.accuracy - 0.5).abs() <= 3.0 * sigma,
                "{} at {} is outside the chance band",
                row.strategy.label(),
                row.accuracy
            );
        }
    }

    #[test]
    fn table_runs_deterministically_with_both_regimes() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let images: Vec<Image<f64>> = (0..24)
            .map(|i| {
                let base = 0.2 + 0.3 * (i % 2) as f64;
                Image::from_fn(22, 22, |_, _| base + rng.gen_range(0.0..0.1))
            })
            .collect();
        let labels: Vec<usize> = (0..24).map(|i| i % 2).collect();
        let ds = tiny_dataset(&images, labels, 2);
        let cfg = tiny_config();
        let a = run_pooling_comparison(&ds, &cfg).unwrap();
        let b = run_pooling_comparison(&ds, &cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 12); // 6 strategies x 2 regimes
        let text = a.to_text();
        assert!(text.contains("partition"));
        assert!(text.contains("overlap"));
        assert!(a.cv_log.len() >= 12);
        // csv has the documented header and one line per row
        let csv = a.to_csv();
        assert!(csv.starts_with("strategy,window,stride,hyperparam,accuracy\n"));
        assert_eq!(csv.lines().count(), 13);
    }

    #[test]
    fn config_validation_rejects_bad_grids() {
        let mut cfg = tiny_config();
        cfg.alpha_grid = vec![1.5];
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_config();
        cfg.r_min_grid = vec![5];
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_config();
        cfg.regimes = vec![GridRegime { window: 4, stride: 4 }];
        // centered maxfun needs an odd window
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_config();
        cfg.test_fraction = 1.0;
        assert!(cfg.validate().is_err());
    }
}
