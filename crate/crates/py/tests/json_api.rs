use serde_json::{json, Value};
use treeot::json_api::{edit_to_op, json_to_tree, simulate, tree_to_json, verify, Client, Server, VerifyArgs};
use treeot_core::verify::SimConfig;

#[test]
fn server_and_clients_over_json() {
    let doc = json_to_tree(&json!({"text": ["X", "Y", "Z"]}));
    let mut server = Server::new(doc.clone()).unwrap();
    let mut c1 = Client::new(1, doc.clone(), 0).unwrap();
    let mut c2 = Client::new(2, doc, 0).unwrap();

    let a = json!({"kind": "insert_t", "path": [0, 0, 0, 0], "tree": {"v": {"t": "scalar", "v": "A"}, "c": []}});
    let e1 = c1.local_edit(a).unwrap();
    let e2 = c2.local_edit(json!({"kind": "delete_t", "path": [0, 0, 0, 1]})).unwrap();
    let b: Vec<Value> = [e2, e1].into_iter().map(|e| server.ingest(e).unwrap()).collect();
    for x in &b {
        c1.ingest_remote(x.clone()).unwrap();
        c2.ingest_remote(x.clone()).unwrap();
    }
    assert_eq!(c1.doc(), server.doc());
    assert_eq!(c2.doc(), server.doc());
    assert_eq!(tree_to_json(server.doc()).unwrap(), json!({"text": ["A", "X", "Z"]}));
    assert_eq!(server.head(), 2);
    assert_eq!(server.history().as_array().unwrap().len(), 2);
    assert_eq!(c1.pending(), json!([]));

    let stale = json!({"site": 1, "seq": 0, "parent_rev": 0, "op": {"kind": "no_op"}});
    assert!(server.ingest(stale).unwrap_err().to_string().starts_with("stale-seq"));
}

#[test]
fn edits_and_reports() {
    let doc = json_to_tree(&json!({"a": 1}));
    let ops = edit_to_op(doc, json!({"kind": "remove_key", "path": [0], "key": "a"})).unwrap();
    assert_eq!(ops, json!([{"kind": "delete_t", "path": [0, 0]}]));

    let args = VerifyArgs { lists: false, max_nodes: 3, max_branch: 3, max_depth: 3, max_len: 0, alphabet: None };
    let r = verify(&args).unwrap();
    assert_eq!(r["violations"], json!([]));
    let bad = VerifyArgs { max_nodes: 0, ..args };
    assert!(verify(&bad).is_err());

    let cfg = SimConfig { min_clients: 2, max_clients: 3, max_ops: 5, sessions: 10, seed: 1 };
    assert_eq!(simulate(&cfg).unwrap()["converged"], json!(10));
}
