//! The binding surface expressed over JSON values, so it can be exercised
//! without an interpreter. Node values and list items are arbitrary JSON.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;
use treeot_core::json_model::{self, DocTree, EditIntent};
use treeot_core::sync::{Broadcast, ClientState, OpEnvelope, ServerState};
use treeot_core::verify::{self, EnumConfig, SimConfig};
use treeot_core::{AccessPath, ListDoc, ListOp, SiteId, Tree, TreeOp};

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("cannot decode {what}: {source}")]
    Decode { what: &'static str, source: serde_json::Error },
    #[error("{0}")]
    Rejected(String),
}

pub type Result<T> = std::result::Result<T, ApiError>;

fn decode<T: DeserializeOwned>(what: &'static str, v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|source| ApiError::Decode { what, source })
}

fn encode<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("encodable")
}

fn rejected(e: impl std::fmt::Display) -> ApiError {
    ApiError::Rejected(e.to_string())
}

pub fn xform_l(o1: Value, s1: u64, o2: Value, s2: u64) -> Result<(Value, Value)> {
    let a: ListOp<Value> = decode("list op", o1)?;
    let b: ListOp<Value> = decode("list op", o2)?;
    let (a2, b2) = treeot_core::xform_l(&a, SiteId(s1), &b, SiteId(s2));
    Ok((encode(&a2), encode(&b2)))
}

pub fn xform_t(o1: Value, s1: u64, o2: Value, s2: u64) -> Result<(Value, Value)> {
    let a: TreeOp<Value> = decode("tree op", o1)?;
    let b: TreeOp<Value> = decode("tree op", o2)?;
    let (a2, b2) = treeot_core::xform_t(&a, SiteId(s1), &b, SiteId(s2));
    Ok((encode(&a2), encode(&b2)))
}

pub fn transformation_point(p1: Vec<usize>, p2: Vec<usize>) -> Result<usize> {
    treeot_core::transformation_point(&AccessPath(p1), &AccessPath(p2)).map_err(rejected)
}

pub fn effect_independent(p1: Vec<usize>, p2: Vec<usize>) -> Result<bool> {
    treeot_core::effect_independent(&AccessPath(p1), &AccessPath(p2)).map_err(rejected)
}

/// Applies a tree operation.
pub fn apply(op: Value, tree: Value) -> Result<Value> {
    let op: TreeOp<Value> = decode("tree op", op)?;
    let tree: Tree<Value> = decode("tree", tree)?;
    treeot_core::apply_tree(&op, &tree).map(|t| encode(&t)).map_err(rejected)
}

pub fn apply_list(op: Value, list: Value) -> Result<Value> {
    let op: ListOp<Value> = decode("list op", op)?;
    let list: ListDoc<Value> = decode("list", list)?;
    treeot_core::apply_list(&op, &list).map(|l| encode(&l)).map_err(rejected)
}

pub fn json_to_tree(j: &Value) -> Value {
    encode(&json_model::json_to_tree(j))
}

pub fn tree_to_json(t: Value) -> Result<Value> {
    let t: DocTree = decode("document tree", t)?;
    json_model::tree_to_json(&t).map_err(rejected)
}

pub fn edit_to_op(doc: Value, intent: Value) -> Result<Value> {
    let doc: DocTree = decode("document tree", doc)?;
    let intent: EditIntent = decode("edit intent", intent)?;
    json_model::edit_to_op(&doc, &intent).map(|ops| encode(&ops)).map_err(rejected)
}

pub struct VerifyArgs {
    pub lists: bool,
    pub max_nodes: usize,
    pub max_branch: usize,
    pub max_depth: usize,
    pub max_len: usize,
    pub alphabet: Option<String>,
}

pub fn verify(args: &VerifyArgs) -> Result<Value> {
    if args.lists {
        let alphabet: Vec<char> = args.alphabet.as_deref().unwrap_or("ab").chars().collect();
        return Ok(encode(&verify::exhaustive_list_tp1(args.max_len, &alphabet)));
    }
    let cfg = EnumConfig {
        max_nodes: args.max_nodes,
        max_branch: args.max_branch,
        max_depth: args.max_depth,
        value_alphabet: args.alphabet.as_deref().unwrap_or("v").chars().collect(),
        payload_pool: verify::default_payloads(),
    };
    verify::exhaustive_tp1(&cfg).map(|r| encode(&r)).map_err(rejected)
}

pub fn simulate(cfg: &SimConfig) -> Result<Value> {
    verify::simulate_sessions(cfg).map(|r| encode(&r)).map_err(rejected)
}

pub struct Server(ServerState<Value>);

impl Server {
    pub fn new(initial: Value) -> Result<Self> {
        Ok(Server(ServerState::new(decode("tree", initial)?)))
    }

    /// Ingests an envelope and returns the broadcast.
    pub fn ingest(&mut self, envelope: Value) -> Result<Value> {
        let e: OpEnvelope<Value> = decode("envelope", envelope)?;
        self.0.ingest(&e).map(|b| encode(&b)).map_err(|e| ApiError::Rejected(format!("{}: {e}", e.code())))
    }

    pub fn doc(&self) -> Value {
        encode(self.0.doc())
    }

    pub fn head(&self) -> u64 {
        self.0.head()
    }

    pub fn doc_at(&self, rev: u64) -> Option<Value> {
        self.0.doc_at(rev).map(|t| encode(&t))
    }

    pub fn history(&self) -> Value {
        encode(&self.0.history())
    }
}

pub struct Client(ClientState<Value>);

impl Client {
    pub fn new(site: u64, snapshot: Value, rev: u64) -> Result<Self> {
        Ok(Client(ClientState::new(SiteId(site), decode("tree", snapshot)?, rev)))
    }

    pub fn site(&self) -> u64 {
        self.0.site.0
    }

    /// Applies a local edit and returns the envelope to send.
    pub fn local_edit(&mut self, op: Value) -> Result<Value> {
        let op: TreeOp<Value> = decode("tree op", op)?;
        self.0.local_edit(op).map(|e| encode(&e)).map_err(rejected)
    }

    pub fn ingest_remote(&mut self, broadcast: Value) -> Result<()> {
        let b: Broadcast<Value> = decode("broadcast", broadcast)?;
        self.0.ingest_remote(&b).map_err(rejected)
    }

    pub fn doc(&self) -> Value {
        encode(self.0.doc())
    }

    pub fn synced_revision(&self) -> u64 {
        self.0.synced_revision()
    }

    pub fn pending(&self) -> Value {
        encode(self.0.pending())
    }
}
