//! Versioned, self-describing model persistence.
//!
//! Each fitted member is written as one JSON file tagged with its kind
//! and a format version; an ensemble is a container file referencing
//! its member files plus the spec (weights, voting mode, preset name)
//! and the task it was trained for. Numbers round-trip exactly: JSON
//! floats are emitted in shortest form that parses back to the same
//! bits, so a saved model predicts identically to the in-memory one.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::TrainedModel;
use crate::data::{EnsembleSpec, LabelSet};
use crate::ensemble::EnsembleModel;
use crate::eval::TaskKind;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("cannot access `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot parse `{path}`: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("cannot serialize model: {0}")]
    Serialize(#[source] serde_json::Error),
    #[error("`{path}` has format version {got}, this build reads {expected}")]
    Version { path: PathBuf, got: u32, expected: u32 },
    #[error("`{path}` is a `{got}` file, expected `{expected}`")]
    WrongKind { path: PathBuf, got: String, expected: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct MemberFile {
    #[allow(dead_code)] // read through the version probe
    format_version: u32,
    #[allow(dead_code)]
    file_kind: String,
    model: TrainedModel,
}

#[derive(Debug, Serialize, Deserialize)]
struct EnsembleFile {
    format_version: u32,
    file_kind: String,
    task: TaskKind,
    spec: EnsembleSpec,
    labels: LabelSet,
    member_files: Vec<String>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PersistError> {
    let text = serde_json::to_string_pretty(value).map_err(PersistError::Serialize)?;
    fs::write(path, text.as_bytes())
        .map_err(|source| PersistError::Io { path: path.to_path_buf(), source })
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

/// Parse the version tag before the body, so a future format fails
/// with a version message rather than a field error.
fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, PersistError> {
    let text = fs::read_to_string(path)
        .map_err(|source| PersistError::Io { path: path.to_path_buf(), source })?;
    let probe: VersionProbe = serde_json::from_str(&text)
        .map_err(|source| PersistError::Json { path: path.to_path_buf(), source })?;
    if probe.format_version != FORMAT_VERSION {
        return Err(PersistError::Version {
            path: path.to_path_buf(),
            got: probe.format_version,
            expected: FORMAT_VERSION,
        });
    }
    serde_json::from_str(&text)
        .map_err(|source| PersistError::Json { path: path.to_path_buf(), source })
}

/// Write one fitted member to `path`.
pub fn save_member(model: &TrainedModel, path: &Path) -> Result<(), PersistError> {
    let file = MemberFile {
        format_version: FORMAT_VERSION,
        file_kind: model.kind().as_str().to_string(),
        model: model.clone(),
    };
    write_json(path, &file)
}

/// Read one fitted member back.
pub fn load_member(path: &Path) -> Result<TrainedModel, PersistError> {
    let file: MemberFile = read_json(path)?;
    Ok(file.model)
}

/// Member file name `i` for a container at `container`: the container
/// path with `.member<i>.json` appended to its stem.
fn member_file_name(container: &Path, i: usize) -> String {
    let stem = container
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".to_string());
    format!("{stem}.member{i}.json")
}

/// Save an ensemble: a container file at `path` plus one member file
/// per fitted member in the same directory.
pub fn save_ensemble(
    model: &EnsembleModel,
    task: TaskKind,
    path: &Path,
) -> Result<(), PersistError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut member_files = Vec::with_capacity(model.members.len());
    for (i, member) in model.members.iter().enumerate() {
        let name = member_file_name(path, i);
        save_member(member, &dir.join(&name))?;
        member_files.push(name);
    }
    let file = EnsembleFile {
        format_version: FORMAT_VERSION,
        file_kind: "ensemble".to_string(),
        task,
        spec: model.spec.clone(),
        labels: model.labels.clone(),
        member_files,
    };
    write_json(path, &file)
}

/// Load an ensemble container and its member files.
pub fn load_ensemble(path: &Path) -> Result<(EnsembleModel, TaskKind), PersistError> {
    let file: EnsembleFile = read_json(path)?;
    if file.file_kind != "ensemble" {
        return Err(PersistError::WrongKind {
            path: path.to_path_buf(),
            got: file.file_kind,
            expected: "ensemble".to_string(),
        });
    }
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let members = file
        .member_files
        .iter()
        .map(|name| load_member(&dir.join(name)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((EnsembleModel { spec: file.spec, members, labels: file.labels }, file.task))
}
