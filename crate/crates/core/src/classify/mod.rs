//! Pooling-comparison classification pipeline: filter-bank features,
//! per-channel pooling into feature vectors, a linear one-vs-rest SVM,
//! and k-fold hyperparameter selection.

mod cv;
mod experiment;
mod features;
mod svm;
mod synth;

pub use cv::{fold_mean_accuracy, kfold_select, make_folds, CvPlan};
pub use experiment::{
    evaluate_method, extract_dataset, run_pooling_comparison, ComparisonConfig, ComparisonTable,
    CvLogRow, FeatureDataset, GridRegime, Strategy, StrategyRow,
};
pub use features::{extract_features, pool_tensor, FeatureTensor, FilterBank, PoolMethod};
pub use svm::{accuracy, svm_predict, svm_train, SvmModel, SvmParams};
pub use synth::{synthetic_corpus, RAW_COLS, RAW_ROWS};
