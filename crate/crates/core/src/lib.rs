//! Supervised-regression toolkit for PV power time series.
//!
//! The crate provides the full pipeline at desk scale:
//!
//! * [`dataset`] — CSV ingestion, cleaning, lag features, splits and a
//!   deterministic synthetic plant generator,
//! * [`cart`] — variance-impurity regression trees (the weak learner),
//! * [`ensemble`] — bagging, random forests and gradient-boosted trees,
//! * [`linear`] — elastic-net regression by coordinate descent,
//! * [`baselines`] — KNN and Gaussian naive-Bayes regression comparators,
//! * [`importance`] — per-feature importance by elastic net, LIME,
//!   boosting gain and permutation, plus the voting combiner,
//! * [`vfw`] — the voted-feature-weighting ensemble: one
//!   leave-one-feature-out subsystem per feature, recombined by
//!   importance-derived weights,
//! * [`eval`] — metrics, k-fold cross-validation, bias/variance
//!   decomposition and the multi-model comparison harness.
//!
//! Everything is deterministic given a seed: randomness flows through named
//! sub-streams (see [`rng`]) so components can be re-run or re-ordered
//! without changing results.

pub mod baselines;
pub mod cart;
pub mod dataset;
pub mod ensemble;
pub mod eval;
pub mod importance;
pub mod linear;
pub mod rng;
pub mod vfw;

pub(crate) mod linalg;

use thiserror::Error;

/// Prediction failure shared by every fitted model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictError {
    #[error("feature row has {got} values, model expects {expected}")]
    ArityMismatch { expected: usize, got: usize },
}

/// A fitted point-prediction model.
///
/// Implemented by every model in the crate so that model-agnostic tooling
/// (LIME, permutation importance, the comparison harness) can treat them
/// uniformly.
pub trait Regressor {
    /// Number of input features the model expects.
    fn n_features(&self) -> usize;

    /// Predict the target for a single feature row.
    fn predict_row(&self, x: &[f64]) -> Result<f64, PredictError>;

    /// Predict a row-major batch of rows.
    fn predict_batch(&self, rows: &[f64]) -> Result<Vec<f64>, PredictError> {
        let d = self.n_features();
        if d == 0 || rows.len() % d != 0 {
            return Err(PredictError::ArityMismatch {
                expected: d,
                got: rows.len(),
            });
        }
        rows.chunks(d).map(|r| self.predict_row(r)).collect()
    }
}

pub use baselines::{fit_gnb, fit_knn, GnbModel, KnnModel};
pub use cart::{fit_tree, RegressionTree, TreeHyperparams};
pub use dataset::{
    add_lag_features, clean, load_csv, save_csv, split, synth_generate, Dataset, LagConfig,
    SplitMode, SplitSpec, SynthConfig,
};
pub use ensemble::{fit_bagging, fit_boosted, BaggingConfig, Ensemble, EnsembleKind};
pub use eval::{
    bias_variance_estimate, compare_models, fit_model, kfold_cv, mae, r2, rmse,
    BiasVarianceReport, ComparisonRow, CvMode, CvResult, FittedModel, KnownNoiseGenerator,
    MetricReport, ModelSpec,
};
pub use importance::{
    combine_importance, lime_explain_local, lime_global_importance, permutation_importance,
    voted_importance, ImportanceMethod, ImportanceVector, LimeConfig, TrainStats, VoteProportions,
    VotedImportanceConfig, VotedImportanceReport,
};
pub use linear::{fit_elastic_net, fit_elastic_net_cv, ElasticNetConfig, LinearModel};
pub use vfw::{fit_vfw, reweight_features, VfwConfig, VfwModel, WeightMode};
