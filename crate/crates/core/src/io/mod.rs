//! Configuration, initial data, checkpoints and report files.

mod checkpoint;
mod config;
mod initial;

use thiserror::Error;

use crate::error::NlsError;

pub use checkpoint::{decode as decode_checkpoint, encode as encode_checkpoint, read_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use config::{
    parse_config, ConfigError, ForcingShape, GridSpec, GronwallSpec, InitialData, InitialSpec, Outputs, RunConfig,
    SweepSpec,
};
pub use initial::{build_grid, build_initial, edge_window, sum_of_bubbles};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Nls(#[from] NlsError),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn read_config(path: &str) -> Result<RunConfig, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.into(), source })?;
    Ok(parse_config(&text)?)
}

pub fn write_text(path: &std::path::Path, text: &str) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| IoError::File { path: dir.display().to_string(), source })?;
    }
    std::fs::write(path, text).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

pub fn write_json<T: serde::Serialize>(path: &std::path::Path, value: &T) -> Result<(), IoError> {
    write_text(path, &(serde_json::to_string_pretty(value)? + "\n"))
}
