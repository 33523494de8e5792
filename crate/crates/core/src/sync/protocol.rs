//! Wire frames. Each frame is one JSON document without newlines.

use serde::{Deserialize, Serialize};

use crate::json_model::EditIntent;
use crate::site::SiteId;
use crate::tree::Tree;
use crate::tree_transform::TreeOp;

use super::{Broadcast, OpEnvelope, Revision, SyncError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", bound(deserialize = "V: Deserialize<'de>"))]
pub enum ClientFrame<V> {
    Hello {
        doc: String,
        site: SiteId,
    },
    Op {
        site: SiteId,
        seq: u64,
        parent_rev: Revision,
        op: TreeOp<V>,
    },
    /// For thin clients: the server turns the intent into operations
    /// against its document at head and ingests them on the sender's
    /// behalf.
    Edit {
        parent_rev: Revision,
        intent: EditIntent,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", bound(deserialize = "V: Deserialize<'de>"))]
pub enum ServerFrame<V> {
    /// `next_seq` is the sequence number the server expects next from
    /// the joining site.
    Snapshot {
        rev: Revision,
        doc: Tree<V>,
        #[serde(default)]
        next_seq: u64,
    },
    Op { rev: Revision, site: SiteId, op: TreeOp<V> },
    Error { code: String, msg: String },
}

impl<V> ClientFrame<V> {
    pub fn from_envelope(e: OpEnvelope<V>) -> Self {
        ClientFrame::Op { site: e.site, seq: e.seq, parent_rev: e.parent_revision, op: e.op }
    }
}

impl<V> ServerFrame<V> {
    pub fn error(code: impl Into<String>, msg: impl Into<String>) -> Self {
        ServerFrame::Error { code: code.into(), msg: msg.into() }
    }
}

impl<V> From<Broadcast<V>> for ServerFrame<V> {
    fn from(b: Broadcast<V>) -> Self {
        ServerFrame::Op { rev: b.rev, site: b.site, op: b.op }
    }
}

impl<V> From<&SyncError> for ServerFrame<V> {
    fn from(e: &SyncError) -> Self {
        ServerFrame::error(e.code(), e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json_model::DocTreeValue;
    use serde_json::json;

    type F = ClientFrame<DocTreeValue>;

    #[test]
    fn client_frames() {
        let hello: F = serde_json::from_str(r#"{"type":"hello","doc":"main","site":3}"#).unwrap();
        assert_eq!(hello, ClientFrame::Hello { doc: "main".into(), site: SiteId(3) });
        let op: F = serde_json::from_str(r#"{"type":"op","site":3,"seq":0,"parent_rev":2,"op":{"kind":"delete_t","path":[0,1]}}"#).unwrap();
        assert_eq!(op, ClientFrame::Op { site: SiteId(3), seq: 0, parent_rev: 2, op: TreeOp::delete([0, 1]) });
        let edit: F =
            serde_json::from_str(r#"{"type":"edit","parent_rev":0,"intent":{"kind":"remove_key","path":[0],"key":"a"}}"#)
                .unwrap();
        assert!(matches!(edit, ClientFrame::Edit { parent_rev: 0, .. }));
    }

    #[test]
    fn server_frames() {
        let f: ServerFrame<DocTreeValue> = Broadcast { rev: 4, site: SiteId(1), op: TreeOp::delete([0]) }.into();
        assert_eq!(
            serde_json::to_value(&f).unwrap(),
            json!({"type":"op","rev":4,"site":1,"op":{"kind":"delete_t","path":[0]}})
        );
        let err: ServerFrame<DocTreeValue> = (&SyncError::StaleSeq { site: SiteId(1), expected: 1, got: 3 }).into();
        let text = serde_json::to_string(&err).unwrap();
        assert!(text.starts_with(r#"{"type":"error","code":"stale-seq","msg":"#));
        assert!(!text.contains('\n'));
    }

    #[test]
    fn snapshot_frame() {
        let f: ServerFrame<char> = ServerFrame::Snapshot { rev: 2, doc: Tree::leaf('r'), next_seq: 1 };
        assert_eq!(
            serde_json::to_string(&f).unwrap(),
            r#"{"type":"snapshot","rev":2,"doc":{"v":"r","c":[]},"next_seq":1}"#
        );
        let old: ServerFrame<char> = serde_json::from_str(r#"{"type":"snapshot","rev":0,"doc":{"v":"r","c":[]}}"#).unwrap();
        assert!(matches!(old, ServerFrame::Snapshot { next_seq: 0, .. }));
    }
}
