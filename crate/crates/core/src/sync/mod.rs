//! Server-ordered replication of a tree document.
//!
//! A central server totally orders operations. Clients apply local edits
//! optimistically, send them tagged with the last server revision they
//! have seen, and transform incoming server operations against their
//! unacknowledged ones. With a single ordering point the pairwise
//! convergence property of the transformation function is sufficient for
//! every replica to converge.

mod client;
mod log;
pub mod protocol;
mod server;

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::site::SiteId;
use crate::tree::TreeError;
use crate::tree_transform::TreeOp;

pub use client::ClientState;
pub use log::{log_replay, LogError, OpLog};
pub use server::{HistoryEntry, ServerState};

/// Server revision; 0 is the initial snapshot.
pub type Revision = u64;

/// A client operation as sent to the server.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(deserialize = "V: Deserialize<'de>"))]
pub struct OpEnvelope<V> {
    pub site: SiteId,
    pub seq: u64,
    #[serde(rename = "parent_rev")]
    pub parent_revision: Revision,
    pub op: TreeOp<V>,
}

/// An operation as committed by the server, ready for every client.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(deserialize = "V: Deserialize<'de>"))]
pub struct Broadcast<V> {
    pub rev: Revision,
    pub site: SiteId,
    pub op: TreeOp<V>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyncError {
    #[error("{site}: expected seq {expected}, got {got}")]
    StaleSeq { site: SiteId, expected: u64, got: u64 },
    #[error("revision {got} does not follow {expected}")]
    RevisionGap { expected: Revision, got: Revision },
    #[error("{site} went back from revision {known} to {got}")]
    StaleRevision { site: SiteId, known: Revision, got: Revision },
    #[error("invalid operation: {0}")]
    InvalidOp(String),
    #[error("transformed operation {op} is not valid at revision {rev}")]
    InvalidAfterTransform { op: String, rev: Revision },
    #[error("acknowledgement for {0} with no pending operation")]
    UnexpectedAck(SiteId),
    #[error("acknowledged operation differs from the pending one")]
    AckMismatch,
    #[error("server state for {0} is inconsistent with its history")]
    Inconsistent(SiteId),
    #[error("peer-to-peer replication needs a transformation with TP2, which is not provided; use the star topology")]
    UnsupportedTopology,
}

impl SyncError {
    /// Short code used in wire error frames.
    pub fn code(&self) -> &'static str {
        match self {
            SyncError::StaleSeq { .. } => "stale-seq",
            SyncError::RevisionGap { .. } => "revision-gap",
            SyncError::StaleRevision { .. } => "stale-revision",
            SyncError::InvalidOp(_) => "invalid-op",
            SyncError::InvalidAfterTransform { .. } => "invalid-after-transform",
            SyncError::UnexpectedAck(_) => "unexpected-ack",
            SyncError::AckMismatch => "ack-mismatch",
            SyncError::Inconsistent(_) => "inconsistent",
            SyncError::UnsupportedTopology => "unsupported-topology",
        }
    }
}

impl From<TreeError> for SyncError {
    fn from(e: TreeError) -> Self {
        SyncError::InvalidOp(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Topology {
    #[default]
    Star,
    PeerToPeer,
}

impl Topology {
    /// Only the star topology converges with a TP1-only transformation.
    pub fn require_star(self) -> Result<(), SyncError> {
        match self {
            Topology::Star => Ok(()),
            Topology::PeerToPeer => Err(SyncError::UnsupportedTopology),
        }
    }
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "star" => Ok(Topology::Star),
            "p2p" | "peer-to-peer" => Ok(Topology::PeerToPeer),
            other => Err(format!("unknown topology {other:?} (expected star or p2p)")),
        }
    }
}
