//! C ABI for the votum toolkit: opaque dataset/model handles, status
//! codes, and a thread-local last-error message.
//!
//! Conventions:
//! - Every fallible function returns a [`VotumStatus`]; on failure the
//!   message is available from `votum_last_error` until the next
//!   failure on the same thread.
//! - Out-parameters are written only on `VOTUM_STATUS_OK`.
//! - Handles are freed with their `_free` function exactly once;
//!   strings returned through `char **` are freed with
//!   `votum_string_free`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use votum::data::{Dataset, ModelKind, Preset, Voting};
use votum::ensemble::{ensemble_error, fit_ensemble, EnsembleErrorQuery, EnsembleModel};
use votum::eval::{confusion, make_task, metrics, Averaging, TaskKind};
use votum::ingest::{dataset_stats, load_csv, prepare_dataset, IngestOptions};
use votum::persist::{load_ensemble, save_ensemble};

/// Status of a votum call; mirrors the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VotumStatus {
    Ok = 0,
    UsageError = 1,
    DataError = 2,
    InternalError = 3,
}

/// Classification task of a trained model.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VotumTask {
    Binary = 0,
    MultiClass = 1,
}

/// How member outputs are combined.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VotumVoting {
    Hard = 0,
    Soft = 1,
}

/// Metric averaging mode.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VotumAveraging {
    Weighted = 0,
    Macro = 1,
}

/// Opaque handle to a loaded dataset.
pub struct VotumDataset {
    inner: Dataset,
}

/// Opaque handle to a trained model or ensemble.
pub struct VotumModel {
    model: EnsembleModel,
    task: TaskKind,
}

thread_local! {
    static LAST_ERROR: std::cell::RefCell<CString> =
        std::cell::RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: VotumStatus, message: &str) -> VotumStatus {
    set_error(message);
    status
}

/// Run a body with panic containment; a panic becomes
/// `VOTUM_STATUS_INTERNAL_ERROR`.
fn guarded<F: FnOnce() -> VotumStatus>(body: F) -> VotumStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(VotumStatus::InternalError, "internal panic"),
    }
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn cstr_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, String> {
    if ptr.is_null() {
        return Err(format!("{name} must not be null"));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| format!("{name} is not valid UTF-8"))
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn votum_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failure on this thread; valid until the next
/// failing call on the same thread. Do not free.
#[no_mangle]
pub extern "C" fn votum_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Free a string returned through a `char **` out-parameter.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn votum_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a CSV file with default column conventions (binary label
/// `label`, type column `type`).
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn votum_dataset_read_csv(
    path: *const c_char,
    out: *mut *mut VotumDataset,
) -> VotumStatus {
    guarded(|| {
        if out.is_null() {
            return fail(VotumStatus::UsageError, "out must not be null");
        }
        let path = match cstr_arg(path, "path") {
            Ok(p) => p,
            Err(m) => return fail(VotumStatus::UsageError, &m),
        };
        match load_csv(Path::new(path), None, &IngestOptions::default()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(VotumDataset { inner }));
                VotumStatus::Ok
            }
            Err(e) => fail(VotumStatus::DataError, &e.to_string()),
        }
    })
}

/// Run the preprocessing pipeline (encode, impute, scale) and return a
/// new dataset handle.
///
/// # Safety
/// `input` must be a live dataset handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn votum_dataset_prepare(
    input: *const VotumDataset,
    out: *mut *mut VotumDataset,
) -> VotumStatus {
    guarded(|| {
        if input.is_null() || out.is_null() {
            return fail(VotumStatus::UsageError, "input and out must not be null");
        }
        match prepare_dataset(&(*input).inner, None) {
            Ok(outcome) => {
                *out = Box::into_raw(Box::new(VotumDataset { inner: outcome.dataset }));
                VotumStatus::Ok
            }
            Err(e) => fail(VotumStatus::DataError, &e.to_string()),
        }
    })
}

/// Number of rows; 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn votum_dataset_rows(dataset: *const VotumDataset) -> usize {
    if dataset.is_null() {
        0
    } else {
        (*dataset).inner.n_rows()
    }
}

/// Number of columns; 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn votum_dataset_cols(dataset: *const VotumDataset) -> usize {
    if dataset.is_null() {
        0
    } else {
        (*dataset).inner.n_cols()
    }
}

/// Per-attack-type row counts as a JSON object string; free the result
/// with `votum_string_free`.
///
/// # Safety
/// `dataset` must be a live dataset handle; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn votum_dataset_stats_json(
    dataset: *const VotumDataset,
    out_json: *mut *mut c_char,
) -> VotumStatus {
    guarded(|| {
        if dataset.is_null() || out_json.is_null() {
            return fail(VotumStatus::UsageError, "dataset and out_json must not be null");
        }
        match dataset_stats(&(*dataset).inner) {
            Ok(stats) => {
                let mut obj = serde_json::Map::new();
                for (label, count) in stats {
                    obj.insert(label, serde_json::Value::from(count));
                }
                let text = serde_json::Value::Object(obj).to_string();
                match CString::new(text) {
                    Ok(c) => {
                        *out_json = c.into_raw();
                        VotumStatus::Ok
                    }
                    Err(_) => fail(VotumStatus::InternalError, "stats contained a NUL byte"),
                }
            }
            Err(e) => fail(VotumStatus::DataError, &e.to_string()),
        }
    })
}

/// Free a dataset handle.
///
/// # Safety
/// `dataset` must be null or a live handle, freed exactly once.
#[no_mangle]
pub unsafe extern "C" fn votum_dataset_free(dataset: *mut VotumDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Train a model on a prepared dataset. `model_spec` is a single kind
/// (`cart`, `rf`, `knn`, `nb`) or a preset (`dt-rf-knn-nb`, `dt-rf-nb`,
/// `dt-rf-knn`).
///
/// # Safety
/// `train` must be a live dataset handle, `model_spec` a valid string,
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn votum_train(
    train: *const VotumDataset,
    model_spec: *const c_char,
    task: VotumTask,
    voting: VotumVoting,
    seed: u64,
    out: *mut *mut VotumModel,
) -> VotumStatus {
    guarded(|| {
        if train.is_null() || out.is_null() {
            return fail(VotumStatus::UsageError, "train and out must not be null");
        }
        let spec_name = match cstr_arg(model_spec, "model_spec") {
            Ok(s) => s,
            Err(m) => return fail(VotumStatus::UsageError, &m),
        };
        let voting = match voting {
            VotumVoting::Hard => Voting::Hard,
            VotumVoting::Soft => Voting::Soft,
        };
        let spec = match Preset::parse(spec_name) {
            Ok(preset) => votum::data::EnsembleSpec::preset(preset, voting),
            Err(_) => match ModelKind::parse(spec_name) {
                Ok(kind) => votum::data::EnsembleSpec::single(
                    votum::data::ModelParams::default_for(kind),
                    voting,
                ),
                Err(e) => return fail(VotumStatus::UsageError, &e.to_string()),
            },
        };
        let task_kind = match task {
            VotumTask::Binary => TaskKind::Binary,
            VotumTask::MultiClass => TaskKind::MultiClass,
        };
        let task_data = match make_task(&(*train).inner, task_kind) {
            Ok(t) => t,
            Err(e) => return fail(VotumStatus::DataError, &e.to_string()),
        };
        match fit_ensemble(&spec, &task_data, seed) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(VotumModel { model, task: task_kind }));
                VotumStatus::Ok
            }
            Err(e) => fail(VotumStatus::DataError, &e.to_string()),
        }
    })
}

/// Save a model (container file plus one file per member).
///
/// # Safety
/// `model` must be a live model handle, `path` a valid string.
#[no_mangle]
pub unsafe extern "C" fn votum_model_save(
    model: *const VotumModel,
    path: *const c_char,
) -> VotumStatus {
    guarded(|| {
        if model.is_null() {
            return fail(VotumStatus::UsageError, "model must not be null");
        }
        let path = match cstr_arg(path, "path") {
            Ok(p) => p,
            Err(m) => return fail(VotumStatus::UsageError, &m),
        };
        match save_ensemble(&(*model).model, (*model).task, Path::new(path)) {
            Ok(()) => VotumStatus::Ok,
            Err(e) => fail(VotumStatus::DataError, &e.to_string()),
        }
    })
}

/// Load a model saved by `votum_model_save` or the CLI.
///
/// # Safety
/// `path` must be a valid string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn votum_model_load(
    path: *const c_char,
    out: *mut *mut VotumModel,
) -> VotumStatus {
    guarded(|| {
        if out.is_null() {
            return fail(VotumStatus::UsageError, "out must not be null");
        }
        let path = match cstr_arg(path, "path") {
            Ok(p) => p,
            Err(m) => return fail(VotumStatus::UsageError, &m),
        };
        match load_ensemble(Path::new(path)) {
            Ok((model, task)) => {
                *out = Box::into_raw(Box::new(VotumModel { model, task }));
                VotumStatus::Ok
            }
            Err(e) => fail(VotumStatus::DataError, &e.to_string()),
        }
    })
}

/// Score a model on a labeled prepared dataset. `out_metrics` receives
/// accuracy, precision, recall, F-measure in that order.
///
/// # Safety
/// `model` and `data` must be live handles; `out_metrics` must point to
/// at least 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn votum_model_evaluate(
    model: *const VotumModel,
    data: *const VotumDataset,
    averaging: VotumAveraging,
    out_metrics: *mut f64,
) -> VotumStatus {
    guarded(|| {
        if model.is_null() || data.is_null() || out_metrics.is_null() {
            return fail(VotumStatus::UsageError, "model, data, out_metrics must not be null");
        }
        let averaging = match averaging {
            VotumAveraging::Weighted => Averaging::Weighted,
            VotumAveraging::Macro => Averaging::Macro,
        };
        let handle = &*model;
        let task = match make_task(&(*data).inner, handle.task) {
            Ok(t) => t,
            Err(e) => return fail(VotumStatus::DataError, &e.to_string()),
        };
        let predictions = match handle.model.predict_batch(&task.features) {
            Ok(p) => p,
            Err(e) => return fail(VotumStatus::DataError, &e.to_string()),
        };
        let cm = match confusion(&task.labels, &predictions, &task.label_set) {
            Ok(cm) => cm,
            Err(e) => return fail(VotumStatus::DataError, &e.to_string()),
        };
        match metrics(&cm, averaging) {
            Ok(values) => {
                let slice = std::slice::from_raw_parts_mut(out_metrics, 4);
                slice[0] = values.accuracy;
                slice[1] = values.precision;
                slice[2] = values.recall;
                slice[3] = values.f_measure;
                VotumStatus::Ok
            }
            Err(e) => fail(VotumStatus::DataError, &e.to_string()),
        }
    })
}

/// Write the input rows plus a `predicted` column to `out_path` as CSV.
///
/// # Safety
/// `model` and `data` must be live handles; `out_path` a valid string.
#[no_mangle]
pub unsafe extern "C" fn votum_model_predict_csv(
    model: *const VotumModel,
    data: *const VotumDataset,
    out_path: *const c_char,
) -> VotumStatus {
    guarded(|| {
        if model.is_null() || data.is_null() {
            return fail(VotumStatus::UsageError, "model and data must not be null");
        }
        let out_path = match cstr_arg(out_path, "out_path") {
            Ok(p) => p,
            Err(m) => return fail(VotumStatus::UsageError, &m),
        };
        let handle = &*model;
        let dataset = &(*data).inner;

        let (matrix, _) = match votum::eval::feature_rows(dataset) {
            Ok(pair) => pair,
            Err(e) => return fail(VotumStatus::DataError, &e.to_string()),
        };
        if dataset.n_rows() > 0 && matrix.n_cols() != handle.model.n_features() {
            return fail(
                VotumStatus::DataError,
                &format!(
                    "input has {} feature columns, model expects {}",
                    matrix.n_cols(),
                    handle.model.n_features()
                ),
            );
        }
        let predictions = match handle.model.predict_batch(&matrix) {
            Ok(p) => p,
            Err(e) => return fail(VotumStatus::DataError, &e.to_string()),
        };
        let labels: Vec<String> = predictions
            .iter()
            .map(|&p| handle.model.labels.label(p).unwrap_or("?").to_string())
            .collect();

        let file = match std::fs::File::create(out_path) {
            Ok(f) => f,
            Err(e) => {
                return fail(VotumStatus::DataError, &format!("cannot write `{out_path}`: {e}"))
            }
        };
        match votum::ingest::write_predictions_to(dataset, &labels, file) {
            Ok(()) => VotumStatus::Ok,
            Err(e) => fail(VotumStatus::DataError, &e.to_string()),
        }
    })
}

/// Analytic ensemble error: probability that at least `k` of `n`
/// independent members with per-member error `epsilon` are wrong
/// together. `k < 0` selects the majority threshold floor(n/2)+1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn votum_ensemble_error(
    n: u32,
    epsilon: f64,
    k: i32,
    out: *mut f64,
) -> VotumStatus {
    guarded(|| {
        if out.is_null() {
            return fail(VotumStatus::UsageError, "out must not be null");
        }
        let threshold = if k < 0 { None } else { Some(k as u32) };
        match EnsembleErrorQuery::new(n, epsilon, threshold) {
            Ok(query) => {
                *out = ensemble_error(&query);
                VotumStatus::Ok
            }
            Err(e) => fail(VotumStatus::UsageError, &e.to_string()),
        }
    })
}

/// Free a model handle.
///
/// # Safety
/// `model` must be null or a live handle, freed exactly once.
#[no_mangle]
pub unsafe extern "C" fn votum_model_free(model: *mut VotumModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
