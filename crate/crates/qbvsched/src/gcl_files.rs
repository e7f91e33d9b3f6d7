//! Per-port GCL export: one `link-<id>.gcl` text file per egress link.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use qbvsched_core::model::{LinkId, Network};
use qbvsched_core::schedule::{derive_all_gcls, Gcl, GclTextError, Schedule, ScheduleError};

use crate::io::IoError;

#[derive(Debug, Error)]
pub enum GclFileError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: GclTextError },
}

pub fn file_name(link: LinkId) -> String {
    format!("link-{}.gcl", link.0)
}

fn link_of(path: &Path) -> Option<LinkId> {
    let name = path.file_name()?.to_str()?;
    let id = name.strip_prefix("link-")?.strip_suffix(".gcl")?;
    id.parse().ok().map(LinkId)
}

/// Writes every link's GCL into `dir` and returns the written paths.
pub fn export_gcls(schedule: &Schedule, network: &Network, dir: &Path) -> Result<Vec<PathBuf>, GclFileError> {
    let gcls = derive_all_gcls(schedule, network)?;
    fs::create_dir_all(dir).map_err(|e| IoError::file(dir, e))?;
    let mut paths = Vec::with_capacity(gcls.len());
    for g in &gcls {
        let path = dir.join(file_name(g.link));
        fs::write(&path, g.to_text()).map_err(|e| IoError::file(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Reads every `link-<id>.gcl` file in `dir`, sorted by link id.
pub fn import_gcls(dir: &Path) -> Result<Vec<Gcl>, GclFileError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| IoError::file(dir, e))? {
        let path = entry.map_err(|e| IoError::file(dir, e))?.path();
        let Some(link) = link_of(&path) else { continue };
        let text = fs::read_to_string(&path).map_err(|e| IoError::file(&path, e))?;
        let gcl = Gcl::from_text(link, &text).map_err(|source| GclFileError::Parse {
            path: path.clone(),
            source,
        })?;
        out.push(gcl);
    }
    out.sort_by_key(|g| g.link);
    Ok(out)
}
