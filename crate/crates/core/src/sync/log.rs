use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::tree::Tree;

use super::{OpEnvelope, ServerState, SyncError};

#[derive(Debug, Error)]
pub enum LogError {
    #[error("op log {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("op log line {line} is truncated")]
    CorruptTail { line: usize },
    #[error("op log line {line}: {msg}")]
    Decode { line: usize, msg: String },
    #[error("op log line {line} rejected: {source}")]
    Rejected { line: usize, source: SyncError },
}

/// Append-only log of ingested envelopes, one JSON document per line.
#[derive(Debug)]
pub struct OpLog {
    path: PathBuf,
    file: File,
}

impl OpLog {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LogError> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|source| LogError::Io { path: path.clone(), source })?;
        Ok(OpLog { path, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes `e` as one line and flushes before returning.
    pub fn append<V: Serialize>(&mut self, e: &OpEnvelope<V>) -> Result<(), LogError> {
        let mut line = serde_json::to_vec(e).expect("envelopes always serialize");
        line.push(b'\n');
        self.file
            .write_all(&line)
            .and_then(|_| self.file.flush())
            .map_err(|source| LogError::Io { path: self.path.clone(), source })
    }
}

/// Rebuilds a server by re-ingesting every logged envelope on top of
/// `initial`. A final line without a newline, or one that does not parse,
/// is reported as a corrupt tail.
pub fn log_replay<V>(path: impl AsRef<Path>, initial: Tree<V>) -> Result<ServerState<V>, LogError>
where
    V: Clone + PartialEq + std::fmt::Debug + DeserializeOwned,
{
    let path = path.as_ref();
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
        Err(source) => return Err(LogError::Io { path: path.to_path_buf(), source }),
    };
    let mut server = ServerState::new(initial);
    let mut lines: Vec<&[u8]> = bytes.split(|&b| b == b'\n').collect();
    // split leaves a trailing empty piece after the final newline
    let tail = lines.pop().unwrap_or_default();
    if !tail.is_empty() {
        return Err(LogError::CorruptTail { line: lines.len() + 1 });
    }
    let last = lines.len();
    for (i, raw) in lines.into_iter().enumerate() {
        let line = i + 1;
        let e: OpEnvelope<V> = serde_json::from_slice(raw).map_err(|err| {
            if line == last && err.is_eof() {
                LogError::CorruptTail { line }
            } else {
                LogError::Decode { line, msg: err.to_string() }
            }
        })?;
        server.ingest(&e).map_err(|source| LogError::Rejected { line, source })?;
    }
    Ok(server)
}
