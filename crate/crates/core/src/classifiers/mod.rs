//! From-scratch base learners: CART decision tree, random forest,
//! k-nearest neighbors, and Gaussian naive Bayes.
//!
//! All four expose the same surface through [`TrainedModel`]: `predict`
//! returns a label index, `predict_dist` a probability vector over the
//! task's label set. `predict` is always the argmax of `predict_dist`
//! with ties broken toward the lower label index, and fits are
//! bit-reproducible given (data, params, seed).

mod cart;
mod forest;
mod gnb;
mod knn;

pub use cart::{cart_fit, TreeModel};
pub use forest::{forest_fit, ForestModel};
pub use gnb::{gnb_fit, GnbModel};
pub use knn::{knn_fit, KnnModel};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{LabelSet, ModelKind, ModelParams};

#[derive(Debug, Error)]
pub enum FitError {
    #[error("cannot fit on an empty training set")]
    EmptyTrainingSet,
    #[error("k must satisfy 1 <= k <= {n} (training rows), got {k}")]
    BadK { k: usize, n: usize },
    #[error("features_per_split must satisfy 1 <= m <= {p} (features), got {m}")]
    BadFeaturesPerSplit { m: usize, p: usize },
    #[error("n_trees must be at least 1")]
    NoTrees,
    #[error("var_smoothing_fraction must be positive, got {0}")]
    BadSmoothing(f64),
    #[error("label index {idx} out of range for {n} labels")]
    LabelOutOfRange { idx: usize, n: usize },
    #[error("feature matrix has {rows} rows but {labels} labels")]
    LabelArity { rows: usize, labels: usize },
}

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("row has {got} features, model was fit on {expected}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    n_cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(n_cols: usize, data: Vec<f64>) -> Self {
        assert!(
            n_cols == 0 && data.is_empty() || n_cols != 0 && data.len().is_multiple_of(n_cols),
            "data length must be a multiple of n_cols"
        );
        FeatureMatrix { n_cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_cols = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            assert_eq!(row.len(), n_cols, "ragged feature rows");
            data.extend_from_slice(row);
        }
        FeatureMatrix { n_cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.data.len().checked_div(self.n_cols).unwrap_or(0)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_cols.max(1))
    }
}

/// A classification task ready for fitting: numeric features, label
/// indices into `label_set`, and the feature names for reporting.
#[derive(Debug, Clone)]
pub struct TaskData {
    pub features: FeatureMatrix,
    pub labels: Vec<usize>,
    pub label_set: LabelSet,
    pub feature_names: Vec<String>,
}

impl TaskData {
    pub fn validate(&self) -> Result<(), FitError> {
        if self.features.n_rows() != self.labels.len() {
            return Err(FitError::LabelArity {
                rows: self.features.n_rows(),
                labels: self.labels.len(),
            });
        }
        let n = self.label_set.len();
        if let Some(&idx) = self.labels.iter().find(|&&l| l >= n) {
            return Err(FitError::LabelOutOfRange { idx, n });
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.features.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }
}

/// Index of the largest value, ties broken toward the lower index.
pub(crate) fn argmax_tie_low(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_arity(expected: usize, row: &[f64]) -> Result<(), PredictError> {
    if row.len() != expected {
        return Err(PredictError::ArityMismatch { expected, got: row.len() });
    }
    Ok(())
}

/// A fitted base learner with the uniform predict / predict_dist
/// surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrainedModel {
    Tree(TreeModel),
    Forest(ForestModel),
    Knn(KnnModel),
    Gnb(GnbModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Tree(_) => ModelKind::Cart,
            TrainedModel::Forest(_) => ModelKind::RandomForest,
            TrainedModel::Knn(_) => ModelKind::Knn,
            TrainedModel::Gnb(_) => ModelKind::GaussianNb,
        }
    }

    pub fn label_set(&self) -> &LabelSet {
        match self {
            TrainedModel::Tree(m) => &m.labels,
            TrainedModel::Forest(m) => &m.labels,
            TrainedModel::Knn(m) => &m.labels,
            TrainedModel::Gnb(m) => &m.labels,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Tree(m) => m.n_features,
            TrainedModel::Forest(m) => m.n_features,
            TrainedModel::Knn(m) => m.n_features(),
            TrainedModel::Gnb(m) => m.n_features(),
        }
    }

    /// Class probabilities for one row; non-negative and summing to 1.
    pub fn predict_dist(&self, row: &[f64]) -> Result<Vec<f64>, PredictError> {
        match self {
            TrainedModel::Tree(m) => m.predict_dist(row),
            TrainedModel::Forest(m) => m.predict_dist(row),
            TrainedModel::Knn(m) => m.predict_dist(row),
            TrainedModel::Gnb(m) => m.predict_dist(row),
        }
    }

    /// Label index for one row: argmax of `predict_dist`, ties toward
    /// the lower label index.
    pub fn predict(&self, row: &[f64]) -> Result<usize, PredictError> {
        Ok(argmax_tie_low(&self.predict_dist(row)?))
    }
}

/// Fit one model of the requested kind. `seed` feeds the forest's
/// bootstrap/feature sampling; the other learners are deterministic
/// without it.
pub fn fit_model(
    params: &ModelParams,
    task: &TaskData,
    seed: u64,
) -> Result<TrainedModel, FitError> {
    task.validate()?;
    match params {
        ModelParams::Cart(p) => Ok(TrainedModel::Tree(cart_fit(task, p)?)),
        ModelParams::Forest(p) => Ok(TrainedModel::Forest(forest_fit(task, p, seed)?)),
        ModelParams::Knn(p) => Ok(TrainedModel::Knn(knn_fit(task, p)?)),
        ModelParams::Gnb(p) => Ok(TrainedModel::Gnb(gnb_fit(task, p)?)),
    }
}
