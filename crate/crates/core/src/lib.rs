//! Ensemble voting intrusion detection for IoT telemetry.
//!
//! `votum` combines four from-scratch base learners (CART decision tree,
//! random forest, k-nearest neighbors, Gaussian naive Bayes) into a
//! weighted plurality-voting classifier, together with the CSV pipeline
//! needed to run it end to end on per-device telemetry files: schema
//! inference, label encoding, median imputation, min-max scaling,
//! dataset merging, stratified splitting, and a cross-comparison harness
//! that reports accuracy / precision / recall / F-measure per
//! (dataset, model) cell.
//!
//! The crate is deterministic by construction: every source of
//! randomness flows from a single seed through documented derivations,
//! and repeated runs with the same inputs produce byte-identical
//! outputs.

pub mod classifiers;
pub mod data;
pub mod ensemble;
pub mod eval;
pub mod ingest;
pub mod persist;
pub mod report;
pub mod seed;

pub use data::{
    Cell, Dataset, EncodingMap, EnsembleSpec, FeatureKind, LabelSet, ModelKind, ModelParams,
    Preset, Schema, Voting,
};
pub use ensemble::EnsembleModel;
pub use eval::{Averaging, ConfusionMatrix, EvaluationReport, MetricRow, TaskKind};
