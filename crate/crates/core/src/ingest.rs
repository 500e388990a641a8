//! CSV ingestion and the preprocessing pipeline: schema inference,
//! label encoding, median/mode imputation, min-max scaling, dataset
//! merging, and deterministic stratified splitting.
//!
//! Operations are pure: the input dataset is never mutated, outputs are
//! new values, and every fitted transform (encodings, impute values,
//! scaler bounds) is returned so it can be re-applied to held-out data.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Cell, Column, DataError, Dataset, EncodingMap, FeatureKind, Schema};
use crate::seed::{derive_seed, rng_from_seed, STREAM_SPLIT};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("csv error in `{path}`: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("row {row}: expected {expected} fields, found {got}")]
    RowArity { row: usize, expected: usize, got: usize },
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NumericParse { row: usize, column: String, value: String },
    #[error("header mismatch: expected column `{expected}` at position {position}, found `{got}`")]
    HeaderMismatch { position: usize, expected: String, got: String },
    #[error("column `{0}`: all values missing, cannot impute without a supplied value")]
    AllMissing(String),
    #[error("column `{column}`: supplied impute value has the wrong kind")]
    ImputeKind { column: String },
    #[error("merge conflict: column `{0}` has both numeric and categorical parts")]
    MergeKindConflict(String),
    #[error("merge requires at least one dataset")]
    MergeEmpty,
    #[error("merge: parts disagree on label columns ({0} vs {1})")]
    MergeLabelMismatch(String, String),
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    BadTestFraction(f64),
    #[error("stratify column `{0}` not found")]
    StratifyColumnMissing(String),
    #[error("class `{0}` has fewer than 2 rows, cannot split")]
    ClassTooSmall(String),
    #[error("type label column not present")]
    TypeColumnMissing,
    #[error("scaler column `{0}` not found in dataset")]
    ScalerColumnMissing(String),
    #[error("scaler column `{0}` is not numeric")]
    ScalerColumnKind(String),
    #[error("column `{column}` still has missing values; impute before scaling")]
    MissingBeforeScale { column: String },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Column-name conventions and missing-value sentinels used when
/// reading raw CSV files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub binary_label_column: String,
    pub type_label_column: String,
    pub missing_sentinels: Vec<String>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            binary_label_column: "label".to_string(),
            type_label_column: "type".to_string(),
            missing_sentinels: vec![
                String::new(),
                "NaN".to_string(),
                "nan".to_string(),
                "-".to_string(),
            ],
        }
    }
}

impl IngestOptions {
    fn is_missing(&self, field: &str) -> bool {
        self.missing_sentinels.iter().any(|s| s == field)
    }
}

/// Load an RFC-4180 CSV file with a header row. When `schema` is given
/// the header must match its column names and cells are parsed
/// according to its kinds; otherwise kinds are inferred (a column is
/// numeric iff every non-missing cell parses as a finite real).
pub fn load_csv(
    path: &Path,
    schema: Option<&Schema>,
    opts: &IngestOptions,
) -> Result<Dataset, IngestError> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(true).flexible(true).from_path(path).map_err(
            |e| match e.kind() {
                csv::ErrorKind::Io(_) => IngestError::Io {
                    path: path.to_path_buf(),
                    source: io::Error::other(e.to_string()),
                },
                _ => IngestError::Csv { path: path.to_path_buf(), source: e },
            },
        )?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| IngestError::Csv { path: path.to_path_buf(), source: e })?
        .iter()
        .map(str::to_string)
        .collect();

    if let Some(schema) = schema {
        for (i, col) in schema.columns.iter().enumerate() {
            let got = headers.get(i).map(String::as_str).unwrap_or("");
            if got != col.name {
                return Err(IngestError::HeaderMismatch {
                    position: i,
                    expected: col.name.clone(),
                    got: got.to_string(),
                });
            }
        }
        if headers.len() != schema.columns.len() {
            return Err(IngestError::RowArity {
                row: 0,
                expected: schema.columns.len(),
                got: headers.len(),
            });
        }
    }

    let n_cols = headers.len();
    let mut raw_rows: Vec<Vec<Option<String>>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| IngestError::Csv { path: path.to_path_buf(), source: e })?;
        if record.len() != n_cols {
            return Err(IngestError::RowArity { row: i + 1, expected: n_cols, got: record.len() });
        }
        let row = record
            .iter()
            .map(|f| if opts.is_missing(f) { None } else { Some(f.to_string()) })
            .collect();
        raw_rows.push(row);
    }

    let schema = match schema {
        Some(s) => s.clone(),
        None => infer_schema(&headers, &raw_rows, opts)?,
    };

    let mut rows = Vec::with_capacity(raw_rows.len());
    for (r, raw) in raw_rows.iter().enumerate() {
        let mut row = Vec::with_capacity(n_cols);
        for (c, field) in raw.iter().enumerate() {
            let cell = match field {
                None => Cell::Missing,
                Some(text) => match schema.columns[c].kind {
                    FeatureKind::Numeric => {
                        let value: f64 =
                            text.trim().parse().map_err(|_| IngestError::NumericParse {
                                row: r + 1,
                                column: schema.columns[c].name.clone(),
                                value: text.clone(),
                            })?;
                        if !value.is_finite() {
                            Cell::Missing
                        } else {
                            Cell::Number(value)
                        }
                    }
                    FeatureKind::Categorical => Cell::Token(text.clone()),
                },
            };
            row.push(cell);
        }
        rows.push(row);
    }

    Ok(Dataset::new(schema, rows)?)
}

fn infer_schema(
    headers: &[String],
    raw_rows: &[Vec<Option<String>>],
    opts: &IngestOptions,
) -> Result<Schema, IngestError> {
    let mut columns = Vec::with_capacity(headers.len());
    for (c, name) in headers.iter().enumerate() {
        let numeric = raw_rows.iter().all(|row| match &row[c] {
            None => true,
            Some(text) => text.trim().parse::<f64>().map(|v| v.is_finite()).unwrap_or(false),
        });
        columns.push(Column {
            name: name.clone(),
            kind: if numeric { FeatureKind::Numeric } else { FeatureKind::Categorical },
        });
    }
    let binary = headers
        .iter()
        .any(|h| h == &opts.binary_label_column)
        .then(|| opts.binary_label_column.clone());
    let type_col = headers
        .iter()
        .any(|h| h == &opts.type_label_column)
        .then(|| opts.type_label_column.clone());
    Ok(Schema::new(columns, binary, type_col)?)
}

/// Write a dataset back out as CSV with the same conventions load uses:
/// header row, shortest round-trip number formatting, missing cells as
/// empty fields.
pub fn write_csv(data: &Dataset, path: &Path) -> Result<(), IngestError> {
    let file = std::fs::File::create(path)
        .map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    write_csv_to(data, file).map_err(|source| IngestError::Csv { path: path.to_path_buf(), source })
}

/// CSV-encode a dataset to any writer.
pub fn write_csv_to<W: io::Write>(data: &Dataset, writer: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(data.schema.columns.iter().map(|c| c.name.as_str()))?;
    for row in &data.rows {
        out.write_record(row.iter().map(Cell::display_string))?;
    }
    out.flush()?;
    Ok(())
}

/// CSV-encode a dataset plus a trailing `predicted` column; the
/// appended column is the only schema change.
pub fn write_predictions_to<W: io::Write>(
    data: &Dataset,
    predictions: &[String],
    writer: W,
) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    let header =
        data.schema.columns.iter().map(|c| c.name.as_str()).chain(std::iter::once("predicted"));
    out.write_record(header)?;
    for (row, predicted) in data.rows.iter().zip(predictions) {
        let record = row.iter().map(Cell::display_string).chain(std::iter::once(predicted.clone()));
        out.write_record(record)?;
    }
    out.flush()?;
    Ok(())
}

/// Drop rows whose label cells (for whichever label columns are
/// present) are missing. Returns the surviving dataset and the number
/// of rows dropped.
pub fn drop_rows_missing_labels(data: &Dataset) -> (Dataset, usize) {
    let label_cols: Vec<usize> =
        [data.schema.binary_label_column.as_deref(), data.schema.type_label_column.as_deref()]
            .into_iter()
            .flatten()
            .filter_map(|name| data.schema.column_index(name))
            .collect();

    if label_cols.is_empty() {
        return (data.clone(), 0);
    }
    let rows: Vec<Vec<Cell>> = data
        .rows
        .iter()
        .filter(|row| label_cols.iter().all(|&c| !row[c].is_missing()))
        .cloned()
        .collect();
    let dropped = data.rows.len() - rows.len();
    (Dataset { schema: data.schema.clone(), rows }, dropped)
}

/// Result of [`label_encode`].
#[derive(Debug)]
pub struct EncodeOutcome {
    pub dataset: Dataset,
    pub map: EncodingMap,
    /// Number of cells that carried a token unseen at fit time and were
    /// mapped to the reserved code.
    pub unseen_tokens: usize,
}

/// Replace every categorical non-label column with contiguous integer
/// codes in first-seen order. With a supplied map (test time), tokens
/// unseen at fit time map to the reserved code `|seen|` and the event
/// is counted. Label columns keep their raw values so downstream task
/// construction can read them.
pub fn label_encode(
    data: &Dataset,
    map: Option<&EncodingMap>,
) -> Result<EncodeOutcome, IngestError> {
    let mut out_map = EncodingMap::default();
    let mut unseen = 0usize;
    let mut columns = data.schema.columns.clone();
    let mut rows = data.rows.clone();

    for (c, col) in data.schema.columns.iter().enumerate() {
        if col.kind != FeatureKind::Categorical || data.schema.is_label_column(&col.name) {
            continue;
        }
        let supplied = map.and_then(|m| m.columns.get(&col.name));
        let mut encoding = match supplied {
            Some(e) => e.clone(),
            None => crate::data::ColumnEncoding::new(),
        };
        let frozen = supplied.is_some();
        for row in rows.iter_mut() {
            let code = match &row[c] {
                Cell::Token(t) => {
                    if frozen {
                        match encoding.code_of(t) {
                            Some(code) => code,
                            None => {
                                unseen += 1;
                                encoding.unseen_code()
                            }
                        }
                    } else {
                        encoding.insert(t)
                    }
                }
                Cell::Number(x) => {
                    // Mixed column: numbers in a categorical column are
                    // encoded through their display form.
                    let t = format!("{x}");
                    if frozen {
                        match encoding.code_of(&t) {
                            Some(code) => code,
                            None => {
                                unseen += 1;
                                encoding.unseen_code()
                            }
                        }
                    } else {
                        encoding.insert(&t)
                    }
                }
                Cell::Missing => continue,
            };
            row[c] = Cell::Number(code as f64);
        }
        columns[c].kind = FeatureKind::Numeric;
        out_map.columns.insert(col.name.clone(), encoding);
    }

    let schema = Schema {
        columns,
        binary_label_column: data.schema.binary_label_column.clone(),
        type_label_column: data.schema.type_label_column.clone(),
    };
    Ok(EncodeOutcome { dataset: Dataset::new(schema, rows)?, map: out_map, unseen_tokens: unseen })
}

/// Replacement value learned per column by [`impute_missing`]: the
/// median for numeric columns, the mode for categorical ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ImputeValue {
    Median(f64),
    Mode(String),
}

pub type ImputeValues = BTreeMap<String, ImputeValue>;

/// Fill missing cells in every non-label column: numeric columns take
/// the median of their observed values (even counts average the two
/// central order statistics), categorical columns take the mode
/// (earliest-seen token among ties). Supplied values are reused as-is,
/// which is how test data is imputed with training statistics.
pub fn impute_missing(
    data: &Dataset,
    supplied: Option<&ImputeValues>,
) -> Result<(Dataset, ImputeValues), IngestError> {
    let mut values = ImputeValues::new();
    let mut rows = data.rows.clone();

    for (c, col) in data.schema.columns.iter().enumerate() {
        if data.schema.is_label_column(&col.name) {
            continue;
        }
        let supplied_value = supplied.and_then(|m| m.get(&col.name));
        let fill = match (col.kind, supplied_value) {
            (FeatureKind::Numeric, Some(ImputeValue::Median(m))) => ImputeValue::Median(*m),
            (FeatureKind::Categorical, Some(ImputeValue::Mode(t))) => ImputeValue::Mode(t.clone()),
            (_, Some(_)) => {
                return Err(IngestError::ImputeKind { column: col.name.clone() });
            }
            (FeatureKind::Numeric, None) => {
                let mut observed: Vec<f64> =
                    data.column_cells(c).filter_map(Cell::as_number).collect();
                if observed.is_empty() {
                    if data.rows.is_empty() {
                        // Nothing to impute in an empty dataset.
                        values.insert(col.name.clone(), ImputeValue::Median(0.0));
                        continue;
                    }
                    return Err(IngestError::AllMissing(col.name.clone()));
                }
                observed.sort_by(f64::total_cmp);
                ImputeValue::Median(median_of_sorted(&observed))
            }
            (FeatureKind::Categorical, None) => {
                // Mode with first-seen tie break.
                let mut order: Vec<&str> = Vec::new();
                let mut counts: std::collections::HashMap<&str, usize> =
                    std::collections::HashMap::new();
                for cell in data.column_cells(c) {
                    if let Cell::Token(t) = cell {
                        let slot = counts.entry(t.as_str()).or_insert(0);
                        if *slot == 0 {
                            order.push(t);
                        }
                        *slot += 1;
                    }
                }
                let mut mode: Option<&str> = None;
                let mut mode_count = 0usize;
                for t in &order {
                    if counts[t] > mode_count {
                        mode_count = counts[t];
                        mode = Some(t);
                    }
                }
                let Some(mode) = mode else {
                    if data.rows.is_empty() {
                        continue;
                    }
                    return Err(IngestError::AllMissing(col.name.clone()));
                };
                ImputeValue::Mode(mode.to_string())
            }
        };

        for row in rows.iter_mut() {
            if row[c].is_missing() {
                row[c] = match &fill {
                    ImputeValue::Median(m) => Cell::Number(*m),
                    ImputeValue::Mode(t) => Cell::Token(t.clone()),
                };
            }
        }
        values.insert(col.name.clone(), fill);
    }

    Ok((Dataset::new(data.schema.clone(), rows)?, values))
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Per-column min/max bounds learned from training data by
/// [`fit_scaler`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: Vec<ScalerColumn>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerColumn {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

/// Learn min/max bounds for every numeric non-label column. The data
/// must already be imputed; a remaining missing cell is an error.
pub fn fit_scaler(data: &Dataset) -> Result<ScalerParams, IngestError> {
    let mut columns = Vec::new();
    for (c, col) in data.schema.columns.iter().enumerate() {
        if col.kind != FeatureKind::Numeric || data.schema.is_label_column(&col.name) {
            continue;
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut any = false;
        for cell in data.column_cells(c) {
            match cell {
                Cell::Number(x) => {
                    min = min.min(*x);
                    max = max.max(*x);
                    any = true;
                }
                Cell::Missing => {
                    return Err(IngestError::MissingBeforeScale { column: col.name.clone() })
                }
                Cell::Token(_) => unreachable!("numeric column holds a token"),
            }
        }
        if !any {
            // Empty dataset: record degenerate bounds so apply is a no-op.
            min = 0.0;
            max = 0.0;
        }
        columns.push(ScalerColumn { name: col.name.clone(), min, max });
    }
    Ok(ScalerParams { columns })
}

/// Map each scaled column through x -> (x - min) / (max - min).
/// Constant columns map to 0.0. Values are never clamped, so held-out
/// data may land outside [0, 1].
pub fn apply_scaler(data: &Dataset, params: &ScalerParams) -> Result<Dataset, IngestError> {
    let mut rows = data.rows.clone();
    for sc in &params.columns {
        let c = data
            .schema
            .column_index(&sc.name)
            .ok_or_else(|| IngestError::ScalerColumnMissing(sc.name.clone()))?;
        if data.schema.columns[c].kind != FeatureKind::Numeric {
            return Err(IngestError::ScalerColumnKind(sc.name.clone()));
        }
        let range = sc.max - sc.min;
        for row in rows.iter_mut() {
            if let Cell::Number(x) = row[c] {
                let scaled = if range == 0.0 { 0.0 } else { (x - sc.min) / range };
                row[c] = Cell::Number(scaled);
            }
        }
    }
    Ok(Dataset::new(data.schema.clone(), rows)?)
}

/// Combine several datasets into one. The output schema is the ordered
/// union of the part columns (first-seen order); rows from a part that
/// lacks a column carry `Missing` there, to be imputed downstream.
pub fn merge_datasets(parts: &[Dataset]) -> Result<Dataset, IngestError> {
    let first = parts.first().ok_or(IngestError::MergeEmpty)?;
    for part in parts {
        if part.schema.binary_label_column != first.schema.binary_label_column
            || part.schema.type_label_column != first.schema.type_label_column
        {
            return Err(IngestError::MergeLabelMismatch(
                format!(
                    "{:?}/{:?}",
                    first.schema.binary_label_column, first.schema.type_label_column
                ),
                format!(
                    "{:?}/{:?}",
                    part.schema.binary_label_column, part.schema.type_label_column
                ),
            ));
        }
    }

    let mut columns: Vec<Column> = Vec::new();
    for part in parts {
        for col in &part.schema.columns {
            match columns.iter().find(|c| c.name == col.name) {
                Some(existing) => {
                    if existing.kind != col.kind {
                        return Err(IngestError::MergeKindConflict(col.name.clone()));
                    }
                }
                None => columns.push(col.clone()),
            }
        }
    }

    let schema = Schema::new(
        columns,
        first.schema.binary_label_column.clone(),
        first.schema.type_label_column.clone(),
    )?;

    let mut rows = Vec::with_capacity(parts.iter().map(Dataset::n_rows).sum());
    for part in parts {
        let mapping: Vec<Option<usize>> =
            schema.columns.iter().map(|c| part.schema.column_index(&c.name)).collect();
        for row in &part.rows {
            let merged: Vec<Cell> = mapping
                .iter()
                .map(|src| match src {
                    Some(i) => row[*i].clone(),
                    None => Cell::Missing,
                })
                .collect();
            rows.push(merged);
        }
    }

    Ok(Dataset::new(schema, rows)?)
}

/// Parameters of a deterministic stratified train/test split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratify_on: String,
}

/// Partition `data` into (train, test) preserving per-class
/// proportions: each class contributes round(count * test_fraction)
/// rows to the test side. The same seed always yields the same
/// partition; train and test together are exactly the input rows.
pub fn stratified_split(
    data: &Dataset,
    spec: &SplitSpec,
) -> Result<(Dataset, Dataset), IngestError> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(IngestError::BadTestFraction(spec.test_fraction));
    }
    let col = data
        .schema
        .column_index(&spec.stratify_on)
        .ok_or_else(|| IngestError::StratifyColumnMissing(spec.stratify_on.clone()))?;

    // Group row indices by class key in first-seen order.
    let mut classes: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, row) in data.rows.iter().enumerate() {
        let key = row[col].display_string();
        match classes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, idxs)) => idxs.push(i),
            None => classes.push((key, vec![i])),
        }
    }
    for (key, idxs) in &classes {
        if idxs.len() < 2 {
            return Err(IngestError::ClassTooSmall(key.clone()));
        }
    }

    let mut rng = rng_from_seed(derive_seed(spec.seed, STREAM_SPLIT));
    let mut test_idx = Vec::new();
    for (_, idxs) in classes.iter_mut() {
        let n_test = (idxs.len() as f64 * spec.test_fraction).round() as usize;
        idxs.shuffle(&mut rng);
        test_idx.extend_from_slice(&idxs[..n_test.min(idxs.len())]);
    }
    test_idx.sort_unstable();

    let mut in_test = vec![false; data.n_rows()];
    for &i in &test_idx {
        in_test[i] = true;
    }
    let mut train_rows = Vec::with_capacity(data.n_rows() - test_idx.len());
    let mut test_rows = Vec::with_capacity(test_idx.len());
    for (i, row) in data.rows.iter().enumerate() {
        if in_test[i] {
            test_rows.push(row.clone());
        } else {
            train_rows.push(row.clone());
        }
    }

    Ok((
        Dataset::new(data.schema.clone(), train_rows)?,
        Dataset::new(data.schema.clone(), test_rows)?,
    ))
}

/// Per-attack-type row counts, ordered canonical labels first, then any
/// other observed keys alphabetically. Type strings are normalized
/// before counting.
pub fn dataset_stats(data: &Dataset) -> Result<Vec<(String, usize)>, IngestError> {
    let type_col = data
        .schema
        .type_label_column
        .as_deref()
        .and_then(|name| data.schema.column_index(name))
        .ok_or(IngestError::TypeColumnMissing)?;

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for cell in data.column_cells(type_col) {
        let key = match cell {
            Cell::Token(t) => crate::data::normalize_type_label(t),
            Cell::Number(x) => format!("{x}"),
            Cell::Missing => "(missing)".to_string(),
        };
        *counts.entry(key).or_insert(0) += 1;
    }

    let mut ordered = Vec::with_capacity(counts.len());
    for label in crate::data::ATTACK_LABELS {
        if let Some(n) = counts.remove(label) {
            ordered.push((label.to_string(), n));
        }
    }
    ordered.extend(counts);
    Ok(ordered)
}

/// Everything [`prepare_dataset`] fits, reusable on held-out data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepareParams {
    pub encodings: EncodingMap,
    pub impute_values: ImputeValues,
    pub scaler: ScalerParams,
}

/// Summary of one prepare run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_in: usize,
    pub rows_out: usize,
    pub dropped_missing_label: usize,
    pub unseen_tokens: usize,
    pub encoded_columns: Vec<String>,
    pub imputed_columns: Vec<String>,
    pub scaled_columns: Vec<String>,
}

#[derive(Debug)]
pub struct PrepareOutcome {
    pub dataset: Dataset,
    pub params: PrepareParams,
    pub report: IngestReport,
}

/// Rewrite attack-type tokens in their canonical lowercase spelling so
/// prepared files carry the canonical vocabulary.
fn normalize_type_column(data: &mut Dataset) {
    let Some(col) =
        data.schema.type_label_column.as_deref().and_then(|name| data.schema.column_index(name))
    else {
        return;
    };
    if data.schema.columns[col].kind != FeatureKind::Categorical {
        return;
    }
    for row in data.rows.iter_mut() {
        if let Cell::Token(t) = &row[col] {
            let norm = crate::data::normalize_type_label(t);
            if norm != *t {
                row[col] = Cell::Token(norm);
            }
        }
    }
}

/// The full preprocessing pipeline: drop rows with missing labels,
/// normalize attack-type spellings, encode categorical features, impute
/// missing values, scale numeric features. With supplied `params` (test
/// time) the fitted transforms are applied instead of re-learned.
pub fn prepare_dataset(
    data: &Dataset,
    params: Option<&PrepareParams>,
) -> Result<PrepareOutcome, IngestError> {
    let rows_in = data.n_rows();
    let (mut kept, dropped) = drop_rows_missing_labels(data);
    normalize_type_column(&mut kept);

    let encoded = label_encode(&kept, params.map(|p| &p.encodings))?;
    let (imputed, impute_values) =
        impute_missing(&encoded.dataset, params.map(|p| &p.impute_values))?;
    let scaler = match params {
        Some(p) => p.scaler.clone(),
        None => fit_scaler(&imputed)?,
    };
    let scaled = apply_scaler(&imputed, &scaler)?;

    let report = IngestReport {
        rows_in,
        rows_out: scaled.n_rows(),
        dropped_missing_label: dropped,
        unseen_tokens: encoded.unseen_tokens,
        encoded_columns: encoded.map.columns.keys().cloned().collect(),
        imputed_columns: impute_values.keys().cloned().collect(),
        scaled_columns: scaler.columns.iter().map(|c| c.name.clone()).collect(),
    };
    Ok(PrepareOutcome {
        dataset: scaled,
        params: PrepareParams { encodings: encoded.map, impute_values, scaler },
        report,
    })
}
