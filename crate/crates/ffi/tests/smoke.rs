//! Exercise the C ABI end to end from Rust: handle lifecycle, status
//! codes, error reporting, and the train / save / load / predict loop.

use std::ffi::{CStr, CString};
use std::io::Write;
use std::ptr;

use votum_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(votum_last_error()).to_string_lossy().into_owned() }
}

fn write_sample_csv(path: &std::path::Path, rows: usize) {
    let mut file = std::fs::File::create(path).unwrap();
    writeln!(file, "temp,door,label,type").unwrap();
    for i in 0..rows {
        let label = i % 2;
        let temp = label as f64 * 9.0 + (i % 5) as f64 * 0.3;
        let door = if i % 3 == 0 { "open" } else { "closed" };
        let ty = if label == 0 { "normal" } else { "injection" };
        writeln!(file, "{temp},{door},{label},{ty}").unwrap();
    }
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(votum_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn full_round_trip_through_the_c_api() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("dev.csv");
    write_sample_csv(&csv_path, 80);
    let csv_c = c(csv_path.to_str().unwrap());

    unsafe {
        let mut raw: *mut VotumDataset = ptr::null_mut();
        assert_eq!(votum_dataset_read_csv(csv_c.as_ptr(), &mut raw), VotumStatus::Ok);
        assert_eq!(votum_dataset_rows(raw), 80);
        assert_eq!(votum_dataset_cols(raw), 4);

        let mut prepared: *mut VotumDataset = ptr::null_mut();
        assert_eq!(votum_dataset_prepare(raw, &mut prepared), VotumStatus::Ok);
        assert_eq!(votum_dataset_rows(prepared), 80);

        let mut stats_json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(votum_dataset_stats_json(prepared, &mut stats_json), VotumStatus::Ok);
        let stats: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(stats_json).to_str().unwrap()).unwrap();
        assert_eq!(stats["normal"], 40);
        assert_eq!(stats["injection"], 40);
        votum_string_free(stats_json);

        let spec = c("dt-rf-nb");
        let mut model: *mut VotumModel = ptr::null_mut();
        assert_eq!(
            votum_train(
                prepared,
                spec.as_ptr(),
                VotumTask::Binary,
                VotumVoting::Hard,
                42,
                &mut model
            ),
            VotumStatus::Ok
        );

        let mut metrics = [0.0f64; 4];
        assert_eq!(
            votum_model_evaluate(model, prepared, VotumAveraging::Weighted, metrics.as_mut_ptr()),
            VotumStatus::Ok
        );
        assert!(metrics.iter().all(|m| (0.0..=1.0).contains(m)), "{metrics:?}");
        assert!(metrics[0] > 0.9, "training-set accuracy {}", metrics[0]);

        let model_path = c(dir.path().join("model.json").to_str().unwrap());
        assert_eq!(votum_model_save(model, model_path.as_ptr()), VotumStatus::Ok);

        let mut loaded: *mut VotumModel = ptr::null_mut();
        assert_eq!(votum_model_load(model_path.as_ptr(), &mut loaded), VotumStatus::Ok);
        let mut metrics2 = [0.0f64; 4];
        assert_eq!(
            votum_model_evaluate(loaded, prepared, VotumAveraging::Weighted, metrics2.as_mut_ptr()),
            VotumStatus::Ok
        );
        assert_eq!(metrics, metrics2, "loaded model must score identically");

        let preds_path = dir.path().join("preds.csv");
        let preds_c = c(preds_path.to_str().unwrap());
        assert_eq!(votum_model_predict_csv(loaded, prepared, preds_c.as_ptr()), VotumStatus::Ok);
        let text = std::fs::read_to_string(&preds_path).unwrap();
        assert!(text.lines().next().unwrap().ends_with(",predicted"));
        assert_eq!(text.lines().count(), 81);

        votum_model_free(model);
        votum_model_free(loaded);
        votum_dataset_free(prepared);
        votum_dataset_free(raw);
    }
}

#[test]
fn error_paths_set_status_and_message() {
    unsafe {
        let mut out: *mut VotumDataset = ptr::null_mut();
        assert_eq!(votum_dataset_read_csv(ptr::null(), &mut out), VotumStatus::UsageError);
        assert!(last_error().contains("path"));

        let missing = c("/definitely/not/here.csv");
        assert_eq!(votum_dataset_read_csv(missing.as_ptr(), &mut out), VotumStatus::DataError);
        assert!(last_error().contains("here.csv"), "got: {}", last_error());

        let mut model: *mut VotumModel = ptr::null_mut();
        let bad_spec = c("super-model");
        assert_eq!(
            votum_train(
                ptr::null(),
                bad_spec.as_ptr(),
                VotumTask::Binary,
                VotumVoting::Hard,
                1,
                &mut model
            ),
            VotumStatus::UsageError
        );

        // Null frees are harmless.
        votum_dataset_free(ptr::null_mut());
        votum_model_free(ptr::null_mut());
        votum_string_free(ptr::null_mut());
    }
}

#[test]
fn ensemble_error_matches_the_cli_value() {
    unsafe {
        let mut value = 0.0f64;
        assert_eq!(votum_ensemble_error(5, 0.1, -1, &mut value), VotumStatus::Ok);
        assert!((value - 0.00856).abs() < 1e-9);

        assert_eq!(votum_ensemble_error(5, 0.1, 3, &mut value), VotumStatus::Ok);
        assert!((value - 0.00856).abs() < 1e-9);

        assert_eq!(votum_ensemble_error(5, 1.5, -1, &mut value), VotumStatus::UsageError);
        assert!(last_error().contains("epsilon"));

        assert_eq!(votum_ensemble_error(0, 0.1, -1, &mut value), VotumStatus::UsageError);
    }
}
