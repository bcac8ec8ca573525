//! Shapley attributions.
//!
//! A coalition `S` of features is evaluated by giving the case its own
//! values on `S` and background values elsewhere. The background is either
//! one composite row (the per-feature mean of k-means centroids) or the
//! centroids themselves, in which case a coalition's value is the model
//! output averaged over them.
//!
//! [`exact_shap`] enumerates every coalition; [`kernel_shap`] fits the
//! constrained weighted regression over enumerated or sampled coalitions.
//! [`hyperparameter_shap`] applies the same machinery to a random-forest
//! surrogate of a search ledger.

mod exact;
mod explain;
mod forest;
mod hyper;
mod kernel;
mod kmeans;
mod products;

pub use exact::{coalition_values, exact_shap, shapley_weight, MAX_EXACT_FEATURES};
pub use explain::{explain_model, Background, BackgroundMode, ExplainMode, EXACT_CROSSOVER, KERNEL_SAMPLES};
pub use forest::{rf_train, RegressionTree, SurrogateForest, MIN_FOREST_ROWS, MIN_SPLIT_SIZE, TREE_COUNT};
pub use hyper::{encode_ledger, hyperparameter_shap, HyperShap, HYPER_FEATURES, MIN_LEDGER_ROWS};
pub use kernel::{kernel_shap, kernel_weight};
pub use kmeans::{kmeans, KMeans, MAX_ITERATIONS, SHIFT_TOLERANCE};
pub use products::{
    complete_linkage_order, dependence, heatmap_order, importance, importance_csv, pearson, Dependence, HeatmapOrder,
    ShapMatrix,
};

use ndarray::ArrayView2;

use crate::evaluation::Scorer;

#[derive(Debug, thiserror::Error)]
pub enum ShapError {
    #[error("k = {k} clusters for {rows} rows")]
    KTooLarge { k: usize, rows: usize },
    #[error("{features} features exceed the exact limit of {max}")]
    TooManyFeatures { features: usize, max: usize },
    #[error("{n} coalition samples; at least {min} needed")]
    TooFewSamples { n: usize, min: usize },
    #[error("attribution matrix has no cases")]
    EmptyMatrix,
    #[error("{rows} rows; the forest needs at least {min}")]
    TooFewRows { rows: usize, min: usize },
    #[error("ledger has {rows} rows; at least {min} needed")]
    LedgerTooSmall { rows: usize, min: usize },
    #[error("expected {expected} features, found {found}")]
    FeatureMismatch { expected: usize, found: usize },
    #[error("validation set is empty")]
    NoCases,
}

/// Adapts a row function to [`Scorer`].
pub struct FnScorer<F>(pub F);

impl<F: Fn(&[f64]) -> f64> Scorer for FnScorer<F> {
    fn score(&self, rows: ArrayView2<'_, f64>) -> Vec<f64> {
        rows.outer_iter()
            .map(|r| match r.as_slice() {
                Some(s) => (self.0)(s),
                None => (self.0)(&r.to_vec()),
            })
            .collect()
    }
}
