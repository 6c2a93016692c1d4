//! Linear one-vs-rest SVM trained by seeded stochastic subgradient
//! descent (Pegasos-style), with iterate averaging.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmParams {
    /// Inverse regularization strength; the ridge weight is
    /// `1 / (reg_c * n_samples)`.
    pub reg_c: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            reg_c: 10.0,
            epochs: 30,
            seed: 0,
        }
    }
}

/// One-vs-rest linear model. The bias is folded in as a trailing
/// constant-one feature.
#[derive(Debug, Clone)]
pub struct SvmModel {
    /// Per-class weight vectors of length `dim + 1`.
    weights: Vec<Vec<f64>>,
    dim: usize,
    /// Objective of the averaged iterate after each epoch, per class.
    pub objective_log: Vec<Vec<f64>>,
}

impl SvmModel {
    pub fn num_classes(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Per-class scores for one sample.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "feature length {} vs model dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self
            .weights
            .iter()
            .map(|w| {
                let mut s = w[self.dim]; // bias
                for (wi, xi) in w[..self.dim].iter().zip(x) {
                    s += wi * xi;
                }
                s
            })
            .collect())
    }
}

/// Hinge-loss objective of one binary classifier.
fn binary_objective(w: &[f64], xs: &[Vec<f64>], ys: &[f64], lambda: f64) -> f64 {
    let dim = w.len() - 1;
    let reg: f64 = 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| {
            let mut s = w[dim];
            for (wi, xi) in w[..dim].iter().zip(x) {
                s += wi * xi;
            }
            (1.0 - y * s).max(0.0)
        })
        .sum();
    reg + hinge / xs.len() as f64
}

/// Train one-vs-rest with deterministic seeded shuffling.
///
/// Needs at least two classes and consistent feature dimensions. Labels
/// are class indices `0..num_classes`.
pub fn svm_train(features: &[Vec<f64>], labels: &[usize], params: &SvmParams) -> Result<SvmModel> {
    if features.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} feature rows vs {} labels",
            features.len(),
            labels.len()
        )));
    }
    if features.is_empty() {
        return Err(Error::Dataset("empty training set".into()));
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::ShapeMismatch("ragged feature rows".into()));
    }
    let num_classes = labels.iter().max().unwrap() + 1;
    if labels.iter().collect::<std::collections::BTreeSet<_>>().len() < 2 {
        return Err(Error::Dataset("training needs at least two classes".into()));
    }
    if params.epochs == 0 || params.reg_c <= 0.0 {
        return Err(Error::InvalidConfig(
            "epochs must be >= 1 and reg_c positive".into(),
        ));
    }

    let n = features.len();
    let lambda = 1.0 / (params.reg_c * n as f64);
    let mut weights = Vec::with_capacity(num_classes);
    let mut objective_log = Vec::with_capacity(num_classes);

    for class in 0..num_classes {
        let ys: Vec<f64> = labels
            .iter()
            .map(|&l| if l == class { 1.0 } else { -1.0 })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(class as u64));
        let mut w = vec![0.0; dim + 1];
        let mut w_sum = vec![0.0; dim + 1];
        let mut log = Vec::with_capacity(params.epochs);
        let mut order: Vec<usize> = (0..n).collect();
        let mut t = 0usize;
        // warm offset keeps the first step at eta = 1 instead of 1/lambda
        let t0 = 1.0 / lambda;

        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * (t0 + t as f64));
                let x = &features[i];
                let y = ys[i];
                let mut s = w[dim];
                for (wi, xi) in w[..dim].iter().zip(x) {
                    s += wi * xi;
                }
                let decay = 1.0 - eta * lambda;
                for wi in w.iter_mut() {
                    *wi *= decay;
                }
                if y * s < 1.0 {
                    let step = eta * y;
                    for (wi, xi) in w[..dim].iter_mut().zip(x) {
                        *wi += step * xi;
                    }
                    w[dim] += step;
                }
                for (acc, wi) in w_sum.iter_mut().zip(&w) {
                    *acc += wi;
                }
            }
            let averaged: Vec<f64> = w_sum.iter().map(|v| v / t as f64).collect();
            log.push(binary_objective(&averaged, features, &ys, lambda));
        }
        let averaged: Vec<f64> = w_sum.iter().map(|v| v / t as f64).collect();
        weights.push(averaged);
        objective_log.push(log);
    }

    Ok(SvmModel {
        weights,
        dim,
        objective_log,
    })
}

/// Predicted class per sample: argmax score, ties to the lowest index.
pub fn svm_predict(model: &SvmModel, features: &[Vec<f64>]) -> Result<Vec<usize>> {
    features
        .iter()
        .map(|x| {
            let scores = model.scores(x)?;
            let mut best = 0usize;
            for (i, &s) in scores.iter().enumerate() {
                if s > scores[best] {
                    best = i;
                }
            }
            Ok(best)
        })
        .collect()
}

/// Fraction of agreeing labels.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(pred.len(), truth.len(), "label vectors must align");
    if pred.is_empty() {
        return 0.0;
    }
    pred.iter().zip(truth).filter(|(p, t)| p == t).count() as f64 / pred.len() as f64
}
