use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::site::SiteId;
use crate::tree::{is_valid, Tree};
use crate::tree_transform::{apply_tree, xform_t, TreeOp};

use super::{Broadcast, OpEnvelope, Revision, SyncError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry<V> {
    pub rev: Revision,
    pub site: SiteId,
    pub seq: u64,
    /// The operation as applied at `rev`.
    pub op: TreeOp<V>,
}

/// What the server knows about one client's view.
///
/// `bridge` holds the site's own operations that the client had not seen
/// acknowledged as of `known_rev`, in the form the client holds them at
/// that revision. Walking history forward from `known_rev` and
/// transforming other sites' entries through the bridge reproduces the
/// client's own transformations exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SiteTrack<V> {
    next_seq: u64,
    known_rev: Revision,
    bridge: VecDeque<TreeOp<V>>,
}

impl<V> Default for SiteTrack<V> {
    fn default() -> Self {
        SiteTrack { next_seq: 0, known_rev: 0, bridge: VecDeque::new() }
    }
}

/// The authoritative document and its totally ordered history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerState<V> {
    initial: Tree<V>,
    doc: Tree<V>,
    history: Vec<HistoryEntry<V>>,
    sites: BTreeMap<SiteId, SiteTrack<V>>,
}

impl<V: Clone + PartialEq + std::fmt::Debug> ServerState<V> {
    pub fn new(initial: Tree<V>) -> Self {
        ServerState { doc: initial.clone(), initial, history: Vec::new(), sites: BTreeMap::new() }
    }

    pub fn doc(&self) -> &Tree<V> {
        &self.doc
    }

    pub fn initial(&self) -> &Tree<V> {
        &self.initial
    }

    pub fn head(&self) -> Revision {
        self.history.len() as Revision
    }

    pub fn history(&self) -> &[HistoryEntry<V>] {
        &self.history
    }

    /// The next sequence number expected from `site`.
    pub fn next_seq(&self, site: SiteId) -> u64 {
        self.sites.get(&site).map_or(0, |t| t.next_seq)
    }

    /// The document as of `rev`, rebuilt from the initial snapshot.
    pub fn doc_at(&self, rev: Revision) -> Option<Tree<V>> {
        if rev > self.head() {
            return None;
        }
        self.history[..rev as usize]
            .iter()
            .try_fold(self.initial.clone(), |doc, e| apply_tree(&e.op, &doc).ok())
    }

    /// Forgets what is known about a site's unacknowledged operations, for
    /// a client that rejoins from a fresh snapshot. Sequence numbering
    /// continues.
    pub fn reset_site(&mut self, site: SiteId) {
        let head = self.head();
        let track = self.sites.entry(site).or_default();
        track.known_rev = head;
        track.bridge.clear();
    }

    /// Transforms `e.op` up to the current head, applies it and returns the
    /// committed operation. On error the state is unchanged.
    pub fn ingest(&mut self, e: &OpEnvelope<V>) -> Result<Broadcast<V>, SyncError> {
        if e.op.path().is_some_and(|p| p.is_empty()) {
            return Err(SyncError::InvalidOp("empty access path".into()));
        }
        let head = self.head();
        let track = self.sites.get(&e.site).cloned().unwrap_or_default();
        if e.seq != track.next_seq {
            return Err(SyncError::StaleSeq { site: e.site, expected: track.next_seq, got: e.seq });
        }
        if e.parent_revision > head {
            return Err(SyncError::RevisionGap { expected: head, got: e.parent_revision });
        }
        if e.parent_revision < track.known_rev {
            return Err(SyncError::StaleRevision { site: e.site, known: track.known_rev, got: e.parent_revision });
        }

        let mut bridge = track.bridge;
        self.walk(e.site, track.known_rev, e.parent_revision, &mut bridge)?;
        let caught_up = bridge.clone();
        bridge.push_back(e.op.clone());
        self.walk(e.site, e.parent_revision, head, &mut bridge)?;
        let op = match (bridge.pop_front(), bridge.is_empty()) {
            (Some(op), true) => op,
            _ => return Err(SyncError::Inconsistent(e.site)),
        };

        if !is_valid(&op, &self.doc) {
            return Err(self.classify_invalid(e, &caught_up, &op));
        }
        let doc = apply_tree(&op, &self.doc).map_err(SyncError::from)?;

        let rev = head + 1;
        self.doc = doc;
        self.history.push(HistoryEntry { rev, site: e.site, seq: e.seq, op: op.clone() });
        let mut bridge = caught_up;
        bridge.push_back(e.op.clone());
        self.sites.insert(e.site, SiteTrack { next_seq: e.seq + 1, known_rev: e.parent_revision, bridge });
        Ok(Broadcast { rev, site: e.site, op })
    }

    /// Advances a site's bridge over history entries `(from, to]`, as the
    /// client does when it receives them.
    fn walk(&self, site: SiteId, from: Revision, to: Revision, bridge: &mut VecDeque<TreeOp<V>>) -> Result<(), SyncError> {
        for entry in &self.history[from as usize..to as usize] {
            if entry.site == site {
                if bridge.pop_front().is_none() {
                    return Err(SyncError::Inconsistent(site));
                }
                continue;
            }
            let mut remote = entry.op.clone();
            for own in bridge.iter_mut() {
                // own op in slot 1, history in slot 2; the client computes
                // the mirrored call and gets the mirrored pair
                let (own2, remote2) = xform_t(own, site, &remote, entry.site);
                *own = own2;
                remote = remote2;
            }
        }
        Ok(())
    }

    fn classify_invalid(&self, e: &OpEnvelope<V>, caught_up: &VecDeque<TreeOp<V>>, op: &TreeOp<V>) -> SyncError {
        let context = self
            .doc_at(e.parent_revision)
            .and_then(|d| caught_up.iter().try_fold(d, |d, o| apply_tree(o, &d).ok()));
        match context {
            Some(ctx) if !is_valid(&e.op, &ctx) => {
                SyncError::InvalidOp(format!("{:?} is not valid at revision {}", e.op, e.parent_revision))
            }
            _ => {
                log::error!("transformed op {op:?} invalid at head {}", self.head());
                SyncError::InvalidAfterTransform { op: format!("{op:?}"), rev: self.head() }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::t;

    fn env(site: u64, seq: u64, parent: Revision, op: TreeOp<char>) -> OpEnvelope<char> {
        OpEnvelope { site: SiteId(site), seq, parent_revision: parent, op }
    }

    #[test]
    fn head_parent_applies_untransformed() {
        let mut s = ServerState::new(t("R(X,Y,Z)"));
        let b = s.ingest(&env(1, 0, 0, TreeOp::insert(t("A"), [0]))).unwrap();
        assert_eq!(b, Broadcast { rev: 1, site: SiteId(1), op: TreeOp::insert(t("A"), [0]) });
        assert_eq!(s.doc(), &t("R(A,X,Y,Z)"));
        assert_eq!(s.head(), 1);
    }

    #[test]
    fn concurrent_insert_and_delete() {
        let mut s = ServerState::new(t("R(X,Y,Z)"));
        s.ingest(&env(1, 0, 0, TreeOp::insert(t("A"), [0]))).unwrap();
        let b = s.ingest(&env(2, 0, 0, TreeOp::delete([1]))).unwrap();
        assert_eq!(b.op, TreeOp::delete([2]));
        assert_eq!(s.doc(), &t("R(A,X,Z)"));
    }

    #[test]
    fn seq_gap_rejected() {
        let mut s = ServerState::new(t("R(X)"));
        let err = s.ingest(&env(1, 1, 0, TreeOp::delete([0]))).unwrap_err();
        assert_eq!(err, SyncError::StaleSeq { site: SiteId(1), expected: 0, got: 1 });
        assert_eq!(err.code(), "stale-seq");
        assert_eq!(s.head(), 0);
    }

    #[test]
    fn future_parent_rejected() {
        let mut s = ServerState::new(t("R(X)"));
        assert!(matches!(s.ingest(&env(1, 0, 3, TreeOp::delete([0]))), Err(SyncError::RevisionGap { .. })));
    }

    #[test]
    fn invalid_op_rejected_and_state_kept() {
        let mut s = ServerState::new(t("R(X)"));
        let before = s.clone();
        assert!(matches!(s.ingest(&env(1, 0, 0, TreeOp::delete([4]))), Err(SyncError::InvalidOp(_))));
        assert_eq!(s, before);
        let empty = TreeOp::DeleteT { path: crate::AccessPath::root() };
        assert!(matches!(s.ingest(&env(1, 0, 0, empty)), Err(SyncError::InvalidOp(_))));
    }

    #[test]
    fn pipelined_ops_from_one_site() {
        // site 1 sends two ops based on rev 0 while site 2's op lands first
        let mut s = ServerState::new(t("R(X,Y)"));
        s.ingest(&env(2, 0, 0, TreeOp::insert(t("B"), [0]))).unwrap();
        s.ingest(&env(1, 0, 0, TreeOp::insert(t("A"), [2]))).unwrap();
        // second op's context already contains A at [2]
        s.ingest(&env(1, 1, 0, TreeOp::delete([2]))).unwrap();
        assert_eq!(s.doc(), &t("R(B,X,Y)"));
    }

    #[test]
    fn history_replays_to_doc() {
        let mut s = ServerState::new(t("R(X,Y,Z)"));
        s.ingest(&env(1, 0, 0, TreeOp::insert(t("A"), [0]))).unwrap();
        s.ingest(&env(2, 0, 0, TreeOp::delete([1]))).unwrap();
        assert_eq!(s.doc_at(s.head()).as_ref(), Some(s.doc()));
        assert_eq!(s.doc_at(0), Some(t("R(X,Y,Z)")));
        assert_eq!(s.doc_at(1), Some(t("R(A,X,Y,Z)")));
        assert_eq!(s.doc_at(3), None);
    }
}
