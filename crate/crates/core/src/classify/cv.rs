//! Seeded k-fold cross-validation over a hyperparameter grid.

use crate::classify::svm::{accuracy, svm_predict, svm_train, SvmParams};
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fold count and seed of the validation plan.
#[derive(Debug, Clone, Copy)]
pub struct CvPlan {
    pub k: usize,
    pub seed: u64,
}

/// Seeded uniform partition of `0..n` into `k` folds; the first `n % k`
/// folds take one extra item.
pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidConfig("cross-validation needs k >= 2".into()));
    }
    if n < k {
        return Err(Error::Dataset(format!(
            "cannot split {n} items into {k} folds"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut at = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(order[at..at + size].to_vec());
        at += size;
    }
    Ok(folds)
}

/// Mean validation accuracy per candidate feature set, and the argmax.
///
/// Each candidate supplies one feature row per training sample (the same
/// samples across candidates); folds are shared so candidates compete on
/// identical splits. Ties resolve to the earliest candidate.
pub fn kfold_select(
    plan: &CvPlan,
    candidate_features: &[Vec<Vec<f64>>],
    labels: &[usize],
    svm: &SvmParams,
) -> Result<(usize, Vec<f64>)> {
    if candidate_features.is_empty() {
        return Err(Error::InvalidConfig("empty hyperparameter grid".into()));
    }
    let n = labels.len();
    for (c, feats) in candidate_features.iter().enumerate() {
        if feats.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "candidate {c} has {} rows for {n} labels",
                feats.len()
            )));
        }
    }
    if candidate_features.len() == 1 {
        // single value: returned without search
        return Ok((0, vec![f64::NAN]));
    }

    let mut means = Vec::with_capacity(candidate_features.len());
    for feats in candidate_features {
        means.push(fold_mean_accuracy(plan, feats, labels, svm)?);
    }

    let mut best = 0usize;
    for (i, &m) in means.iter().enumerate() {
        if m > means[best] {
            best = i;
        }
    }
    Ok((best, means))
}

/// Mean validation accuracy of one feature set over the plan's folds.
pub fn fold_mean_accuracy(
    plan: &CvPlan,
    features: &[Vec<f64>],
    labels: &[usize],
    svm: &SvmParams,
) -> Result<f64> {
    let n = labels.len();
    if features.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} feature rows for {n} labels",
            features.len()
        )));
    }
    let folds = make_folds(n, plan.k, plan.seed)?;
    let mut sum = 0.0;
    for fold in &folds {
        let val_set: std::collections::BTreeSet<usize> = fold.iter().copied().collect();
        let mut train_x = Vec::with_capacity(n - fold.len());
        let mut train_y = Vec::with_capacity(n - fold.len());
        for i in 0..n {
            if !val_set.contains(&i) {
                train_x.push(features[i].clone());
                train_y.push(labels[i]);
            }
        }
        let val_x: Vec<Vec<f64>> = fold.iter().map(|&i| features[i].clone()).collect();
        let val_y: Vec<usize> = fold.iter().map(|&i| labels[i]).collect();
        let model = svm_train(&train_x, &train_y, svm)?;
        let pred = svm_predict(&model, &val_x)?;
        sum += accuracy(&pred, &val_y);
    }
    Ok(sum / folds.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition_exactly() {
        let folds = make_folds(9, 3, 11).unwrap();
        assert_eq!(folds.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3, 3]);
        let mut all: Vec<usize> = folds.into_iter().flatten().collect();
        all.sort_unstable();
        assert_eq!(all, (0..9).collect::<Vec<_>>());

        // uneven case
        let folds = make_folds(10, 3, 2).unwrap();
        assert_eq!(folds.iter().map(Vec::len).collect::<Vec<_>>(), vec![4, 3, 3]);
        let mut all: Vec<usize> = folds.into_iter().flatten().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn folds_are_seed_deterministic() {
        assert_eq!(make_folds(20, 4, 5).unwrap(), make_folds(20, 4, 5).unwrap());
        assert_ne!(make_folds(20, 4, 5).unwrap(), make_folds(20, 4, 6).unwrap());
    }

    #[test]
    fn folds_reject_degenerate_plans() {
        assert!(make_folds(5, 1, 0).is_err());
        assert!(make_folds(2, 3, 0).is_err());
    }

    #[test]
    fn singleton_grid_skips_search() {
        let plan = CvPlan { k: 3, seed: 0 };
        let feats = vec![vec![vec![1.0]; 6]];
        let labels = vec![0, 1, 0, 1, 0, 1];
        let (best, _) = kfold_select(&plan, &feats, &labels, &SvmParams::default()).unwrap();
        assert_eq!(best, 0);
    }

    #[test]
    fn selects_the_informative_candidate() {
        // candidate 0: constant features (useless); candidate 1: label in
        // the feature (perfectly informative)
        let labels: Vec<usize> = (0..12).map(|i| i % 2).collect();
        let useless = vec![vec![1.0]; 12];
        let informative: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| vec![if l == 0 { -1.0 } else { 1.0 }])
            .collect();
        let plan = CvPlan { k: 3, seed: 4 };
        let (best, means) = kfold_select(
            &plan,
            &[useless, informative],
            &labels,
            &SvmParams {
                reg_c: 10.0,
                epochs: 30,
                seed: 0,
            },
        )
        .unwrap();
        assert_eq!(best, 1);
        assert!(means[1] > means[0]);
        assert!((means[1] - 1.0).abs() < 1e-12);
    }
}
