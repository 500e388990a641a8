//! Confusion-matrix metrics, task construction, and the
//! cross-comparison harness.
//!
//! Per-class metrics are carried as integer (numerator, denominator)
//! pairs and weighted averages are computed as
//! sum(support_i * num_i / den_i) / total with exact integer products.
//! For recall the denominator equals the support, so each term divides
//! back to an exact integer and the identity accuracy == weighted
//! recall holds bit-exactly, not just approximately.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::{FeatureMatrix, TaskData};
use crate::data::{
    canonical_attack_index, canonical_attack_labels, Cell, Dataset, EnsembleSpec, LabelSet,
};
use crate::ensemble::fit_ensemble;
use crate::ingest::{apply_scaler, fit_scaler, stratified_split, SplitSpec};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("true and predicted sequences differ in length ({truth} vs {pred})")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("label index {idx} outside the {n}-label set")]
    UnknownLabel { idx: usize, n: usize },
    #[error("cannot compute metrics on an empty confusion matrix")]
    EmptyMatrix,
    #[error("binary label column not present")]
    BinaryColumnMissing,
    #[error("type label column not present")]
    TypeColumnMissing,
    #[error("row {row}: binary label must be 0 or 1, got `{value}`")]
    BadBinaryLabel { row: usize, value: String },
    #[error("row {row}: label is missing")]
    MissingLabel { row: usize },
    #[error("row {row}, column `{column}`: feature is not numeric; encode the dataset first")]
    NonNumericFeature { row: usize, column: String },
    #[error("row {row}, column `{column}`: feature is missing; impute the dataset first")]
    MissingFeature { row: usize, column: String },
    #[error(transparent)]
    Data(#[from] crate::data::DataError),
}

/// Square count matrix over an ordered label set; rows are true labels,
/// columns predicted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: LabelSet,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|row| row[j]).sum()
    }
}

/// Count (true, predicted) pairs into a confusion matrix.
pub fn confusion(
    truth: &[usize],
    pred: &[usize],
    labels: &LabelSet,
) -> Result<ConfusionMatrix, EvalError> {
    if truth.len() != pred.len() {
        return Err(EvalError::LengthMismatch { truth: truth.len(), pred: pred.len() });
    }
    let n = labels.len();
    let mut counts = vec![vec![0u64; n]; n];
    for (&t, &p) in truth.iter().zip(pred) {
        if t >= n {
            return Err(EvalError::UnknownLabel { idx: t, n });
        }
        if p >= n {
            return Err(EvalError::UnknownLabel { idx: p, n });
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { labels: labels.clone(), counts })
}

/// How per-class scores are combined into one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Averaging {
    /// Weight each class by its true-class support; keeps overall
    /// recall equal to accuracy.
    Weighted,
    /// Unweighted mean over classes with support > 0.
    Macro,
}

impl Averaging {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "weighted" => Some(Averaging::Weighted),
            "macro" => Some(Averaging::Macro),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Averaging::Weighted => "weighted",
            Averaging::Macro => "macro",
        }
    }
}

/// The four headline metrics plus the count of zero-denominator cells
/// that were defined as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub zero_denominator_cells: usize,
}

/// Per-class metric as an exact integer fraction; a zero denominator
/// means the metric is defined as 0.
#[derive(Debug, Clone, Copy)]
struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

fn average(fractions: &[Fraction], supports: &[u64], total: u64, averaging: Averaging) -> f64 {
    match averaging {
        Averaging::Weighted => {
            let mut sum = 0.0f64;
            for (frac, &support) in fractions.iter().zip(supports) {
                if frac.den != 0 {
                    // support * num is an exact integer product in f64;
                    // when den == support the division is exact too.
                    sum += (support as f64 * frac.num as f64) / frac.den as f64;
                }
            }
            sum / total as f64
        }
        Averaging::Macro => {
            let mut sum = 0.0f64;
            let mut n = 0usize;
            for (frac, &support) in fractions.iter().zip(supports) {
                if support > 0 {
                    sum += frac.value();
                    n += 1;
                }
            }
            if n == 0 {
                0.0
            } else {
                sum / n as f64
            }
        }
    }
}

/// Accuracy, precision, recall, and F-measure from a confusion matrix.
///
/// Per class i: precision = cm(i,i) / column sum, recall = cm(i,i) /
/// row sum, F1 = 2*cm(i,i) / (row sum + column sum); any zero
/// denominator defines the cell as 0 and is counted.
pub fn metrics(cm: &ConfusionMatrix, averaging: Averaging) -> Result<MetricValues, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let n = cm.labels.len();
    let mut precisions = Vec::with_capacity(n);
    let mut recalls = Vec::with_capacity(n);
    let mut f1s = Vec::with_capacity(n);
    let mut supports = Vec::with_capacity(n);
    let mut zero_cells = 0usize;

    for i in 0..n {
        let tp = cm.counts[i][i];
        let row = cm.row_sum(i);
        let col = cm.col_sum(i);
        let precision = Fraction { num: tp, den: col };
        let recall = Fraction { num: tp, den: row };
        let f1 = Fraction { num: 2 * tp, den: row + col };
        zero_cells += [precision.den, recall.den, f1.den].iter().filter(|&&d| d == 0).count();
        precisions.push(precision);
        recalls.push(recall);
        f1s.push(f1);
        supports.push(row);
    }

    Ok(MetricValues {
        accuracy: cm.trace() as f64 / total as f64,
        precision: average(&precisions, &supports, total, averaging),
        recall: average(&recalls, &supports, total, averaging),
        f_measure: average(&f1s, &supports, total, averaging),
        zero_denominator_cells: zero_cells,
    })
}

/// Which label column drives the task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskKind {
    Binary,
    MultiClass,
}

impl TaskKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "binary" => Some(TaskKind::Binary),
            "multiclass" | "multi-class" | "multi" => Some(TaskKind::MultiClass),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Binary => "binary",
            TaskKind::MultiClass => "multiclass",
        }
    }
}

fn extract_features(data: &Dataset, feature_indices: &[usize]) -> Result<Vec<Vec<f64>>, EvalError> {
    let mut rows = Vec::with_capacity(data.n_rows());
    for (r, row) in data.rows.iter().enumerate() {
        let mut features = Vec::with_capacity(feature_indices.len());
        for &c in feature_indices {
            match &row[c] {
                Cell::Number(x) => features.push(*x),
                Cell::Token(_) => {
                    return Err(EvalError::NonNumericFeature {
                        row: r + 1,
                        column: data.schema.columns[c].name.clone(),
                    })
                }
                Cell::Missing => {
                    return Err(EvalError::MissingFeature {
                        row: r + 1,
                        column: data.schema.columns[c].name.clone(),
                    })
                }
            }
        }
        rows.push(features);
    }
    Ok(rows)
}

/// Build the normal-vs-attack task from the binary label column. Label
/// columns are removed from the feature matrix.
pub fn make_binary_task(data: &Dataset) -> Result<TaskData, EvalError> {
    let label_col = data
        .schema
        .binary_label_column
        .as_deref()
        .and_then(|name| data.schema.column_index(name))
        .ok_or(EvalError::BinaryColumnMissing)?;

    let mut labels = Vec::with_capacity(data.n_rows());
    for (r, row) in data.rows.iter().enumerate() {
        let label = match &row[label_col] {
            Cell::Number(x) if *x == 0.0 => 0usize,
            Cell::Number(x) if *x == 1.0 => 1usize,
            Cell::Token(t) if t.trim() == "0" => 0,
            Cell::Token(t) if t.trim() == "1" => 1,
            Cell::Missing => return Err(EvalError::MissingLabel { row: r + 1 }),
            other => {
                return Err(EvalError::BadBinaryLabel { row: r + 1, value: other.display_string() })
            }
        };
        labels.push(label);
    }

    let feature_indices = data.schema.feature_indices();
    let features = extract_features(data, &feature_indices)?;
    Ok(TaskData {
        features: FeatureMatrix::from_rows(&features),
        labels,
        label_set: LabelSet::binary(),
        feature_names: feature_indices
            .iter()
            .map(|&c| data.schema.columns[c].name.clone())
            .collect(),
    })
}

/// Build the 8-way attack-type task from the type label column; labels
/// map through the canonical attack vocabulary.
pub fn make_multiclass_task(data: &Dataset) -> Result<TaskData, EvalError> {
    let type_col = data
        .schema
        .type_label_column
        .as_deref()
        .and_then(|name| data.schema.column_index(name))
        .ok_or(EvalError::TypeColumnMissing)?;

    let mut labels = Vec::with_capacity(data.n_rows());
    for (r, row) in data.rows.iter().enumerate() {
        let label = match &row[type_col] {
            Cell::Token(t) => canonical_attack_index(t)?,
            Cell::Missing => return Err(EvalError::MissingLabel { row: r + 1 }),
            Cell::Number(x) => canonical_attack_index(&format!("{x}"))?,
        };
        labels.push(label);
    }

    let feature_indices = data.schema.feature_indices();
    let features = extract_features(data, &feature_indices)?;
    Ok(TaskData {
        features: FeatureMatrix::from_rows(&features),
        labels,
        label_set: canonical_attack_labels(),
        feature_names: feature_indices
            .iter()
            .map(|&c| data.schema.columns[c].name.clone())
            .collect(),
    })
}

pub fn make_task(data: &Dataset, kind: TaskKind) -> Result<TaskData, EvalError> {
    match kind {
        TaskKind::Binary => make_binary_task(data),
        TaskKind::MultiClass => make_multiclass_task(data),
    }
}

/// Numeric feature rows of every non-label column, for prediction
/// inputs that need not carry label columns at all.
pub fn feature_rows(data: &Dataset) -> Result<(FeatureMatrix, Vec<String>), EvalError> {
    let indices = data.schema.feature_indices();
    let rows = extract_features(data, &indices)?;
    let names = indices.iter().map(|&c| data.schema.columns[c].name.clone()).collect();
    Ok((FeatureMatrix::from_rows(&rows), names))
}

/// One model entry of a comparison grid.
#[derive(Debug, Clone)]
pub struct CompareEntry {
    pub id: String,
    pub spec: EnsembleSpec,
}

/// Grid settings shared by every (dataset, model) cell.
#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub task: TaskKind,
    pub averaging: Averaging,
    pub test_fraction: f64,
    pub seed: u64,
}

/// One row of the cross-comparison report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricRow {
    pub dataset: String,
    pub model: String,
    pub task: TaskKind,
    pub averaging: Averaging,
    pub values: MetricValues,
}

/// A cell whose fit or prediction failed; the grid keeps going.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellFailure {
    pub dataset: String,
    pub model: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rows: Vec<MetricRow>,
    pub failures: Vec<CellFailure>,
}

/// Run the full comparison grid: for each dataset, split once with the
/// configured seed (every model sees the identical split), rescale
/// numeric features on the training side only, then fit and score every
/// model. Rows come back in (dataset, model) input order; failed cells
/// are recorded without aborting the rest of the grid.
pub fn compare(
    datasets: &[(String, Dataset)],
    models: &[CompareEntry],
    cfg: &CompareConfig,
) -> EvaluationReport {
    let mut report = EvaluationReport::default();

    for (dataset_id, dataset) in datasets {
        let cell_input = match prepare_split(dataset, cfg) {
            Ok(pair) => pair,
            Err(message) => {
                for entry in models {
                    report.failures.push(CellFailure {
                        dataset: dataset_id.clone(),
                        model: entry.id.clone(),
                        message: message.clone(),
                    });
                }
                continue;
            }
        };
        let (train_task, test_task) = &cell_input;

        for entry in models {
            match score_cell(train_task, test_task, &entry.spec, cfg) {
                Ok(values) => report.rows.push(MetricRow {
                    dataset: dataset_id.clone(),
                    model: entry.id.clone(),
                    task: cfg.task,
                    averaging: cfg.averaging,
                    values,
                }),
                Err(message) => report.failures.push(CellFailure {
                    dataset: dataset_id.clone(),
                    model: entry.id.clone(),
                    message,
                }),
            }
        }
    }
    report
}

fn prepare_split(data: &Dataset, cfg: &CompareConfig) -> Result<(TaskData, TaskData), String> {
    let stratify_on = match cfg.task {
        TaskKind::Binary => data
            .schema
            .binary_label_column
            .clone()
            .ok_or_else(|| EvalError::BinaryColumnMissing.to_string())?,
        TaskKind::MultiClass => data
            .schema
            .type_label_column
            .clone()
            .ok_or_else(|| EvalError::TypeColumnMissing.to_string())?,
    };
    let spec = SplitSpec { test_fraction: cfg.test_fraction, seed: cfg.seed, stratify_on };
    let (train, test) = stratified_split(data, &spec).map_err(|e| e.to_string())?;

    // Leakage-safe scaling: bounds come from the training side only.
    let scaler = fit_scaler(&train).map_err(|e| e.to_string())?;
    let train = apply_scaler(&train, &scaler).map_err(|e| e.to_string())?;
    let test = apply_scaler(&test, &scaler).map_err(|e| e.to_string())?;

    let train_task = make_task(&train, cfg.task).map_err(|e| e.to_string())?;
    let test_task = make_task(&test, cfg.task).map_err(|e| e.to_string())?;
    Ok((train_task, test_task))
}

fn score_cell(
    train: &TaskData,
    test: &TaskData,
    spec: &EnsembleSpec,
    cfg: &CompareConfig,
) -> Result<MetricValues, String> {
    let model = fit_ensemble(spec, train, cfg.seed).map_err(|e| e.to_string())?;
    let predictions = model.predict_batch(&test.features).map_err(|e| e.to_string())?;
    let cm = confusion(&test.labels, &predictions, &test.label_set).map_err(|e| e.to_string())?;
    metrics(&cm, cfg.averaging).map_err(|e| e.to_string())
}
