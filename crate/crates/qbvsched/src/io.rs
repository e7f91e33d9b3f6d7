//! JSON files for networks, stream sets, model configurations and schedules.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use qbvsched_core::engine::Instance;
use qbvsched_core::model::{ModelConfig, Network, Stream};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

impl IoError {
    pub fn file(path: &Path, source: std::io::Error) -> Self {
        IoError::File {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| IoError::file(dir, e))?;
    }
    fs::write(path, text).map_err(|e| IoError::file(path, e))
}

/// Assembles an instance from its three files; a missing config file means
/// the default model.
pub fn load_instance(net: &Path, streams: &Path, cfg: Option<&Path>) -> Result<Instance, IoError> {
    let network: Network = read_json(net)?;
    let streams: Vec<Stream> = read_json(streams)?;
    let cfg: ModelConfig = match cfg {
        Some(p) => read_json(p)?,
        None => ModelConfig::default(),
    };
    Ok(Instance { network, streams, cfg })
}
