use std::collections::VecDeque;

use crate::site::SiteId;
use crate::tree::{is_valid, Tree};
use crate::tree_transform::{apply_tree, xform_t, TreeOp};

use super::{Broadcast, OpEnvelope, Revision, SyncError};

/// A replica: the server document at `synced_revision` with `pending`
/// applied on top, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientState<V> {
    pub site: SiteId,
    doc: Tree<V>,
    synced_revision: Revision,
    pending: VecDeque<TreeOp<V>>,
    next_seq: u64,
}

impl<V: Clone + PartialEq + std::fmt::Debug> ClientState<V> {
    /// A client starting from a server snapshot.
    pub fn new(site: SiteId, snapshot: Tree<V>, rev: Revision) -> Self {
        ClientState { site, doc: snapshot, synced_revision: rev, pending: VecDeque::new(), next_seq: 0 }
    }

    pub fn doc(&self) -> &Tree<V> {
        &self.doc
    }

    pub fn synced_revision(&self) -> Revision {
        self.synced_revision
    }

    pub fn pending(&self) -> &VecDeque<TreeOp<V>> {
        &self.pending
    }

    /// Continues sequence numbering from `next_seq`, for a client that
    /// rejoins a server which has seen its earlier operations.
    pub fn with_next_seq(mut self, next_seq: u64) -> Self {
        self.next_seq = next_seq;
        self
    }

    /// Applies a local edit and returns the envelope to send.
    pub fn local_edit(&mut self, op: TreeOp<V>) -> Result<OpEnvelope<V>, SyncError> {
        if op.path().is_some_and(|p| p.is_empty()) || !is_valid(&op, &self.doc) {
            return Err(SyncError::InvalidOp(format!("{op:?} is not valid on the local document")));
        }
        self.doc = apply_tree(&op, &self.doc)?;
        self.pending.push_back(op.clone());
        let envelope =
            OpEnvelope { site: self.site, seq: self.next_seq, parent_revision: self.synced_revision, op };
        self.next_seq += 1;
        Ok(envelope)
    }

    /// Handles the next server broadcast: an acknowledgement of our own
    /// oldest pending op, or a remote op that is transformed through every
    /// pending op before being applied. On error the state is unchanged.
    pub fn ingest_remote(&mut self, b: &Broadcast<V>) -> Result<(), SyncError> {
        if b.rev != self.synced_revision + 1 {
            return Err(SyncError::RevisionGap { expected: self.synced_revision + 1, got: b.rev });
        }
        if b.site == self.site {
            match self.pending.front() {
                None => return Err(SyncError::UnexpectedAck(self.site)),
                Some(op) if *op != b.op => return Err(SyncError::AckMismatch),
                Some(_) => {}
            }
            self.pending.pop_front();
            self.synced_revision = b.rev;
            return Ok(());
        }
        let mut remote = b.op.clone();
        let mut pending = self.pending.clone();
        for own in pending.iter_mut() {
            let (remote2, own2) = xform_t(&remote, b.site, own, self.site);
            remote = remote2;
            *own = own2;
        }
        let doc = apply_tree(&remote, &self.doc)
            .map_err(|_| SyncError::InvalidAfterTransform { op: format!("{remote:?}"), rev: b.rev })?;
        self.doc = doc;
        self.pending = pending;
        self.synced_revision = b.rev;
        Ok(())
    }
}
