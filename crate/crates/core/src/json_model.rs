//! JSON documents as ordered trees.
//!
//! A document maps to a tree under a `Root` node with exactly one child:
//! scalars become leaves, arrays keep their element order, and object
//! members become `Key` nodes (one child each, the member value) sorted by
//! key. Concurrent edits can leave an object unsorted or holding the same
//! key twice; readers take the first occurrence.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::tree::{AccessPath, Tree};
use crate::tree_transform::TreeOp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "lowercase")]
pub enum DocTreeValue {
    Root,
    Scalar { v: Value },
    Array,
    Object,
    Key { k: String },
}

pub type DocTree = Tree<DocTreeValue>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonModelError {
    #[error("malformed document tree at {path}: {reason}")]
    MalformedTree { path: AccessPath, reason: &'static str },
    #[error("no {expected} at {path}")]
    NoSuchContainer { path: AccessPath, expected: &'static str },
    #[error("no key {key:?} in object at {path}")]
    NoSuchKey { path: AccessPath, key: String },
    #[error("index {index} out of range for array of length {len} at {path}")]
    IndexOutOfRange { path: AccessPath, index: usize, len: usize },
}

/// A semantic edit against a JSON document, addressed by the access path
/// of the container node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EditIntent {
    SetKey { path: AccessPath, key: String, value: Value },
    RemoveKey { path: AccessPath, key: String },
    ArrayInsert { path: AccessPath, index: usize, value: Value },
    ArrayRemove { path: AccessPath, index: usize },
}

pub fn json_to_tree(j: &Value) -> DocTree {
    Tree::node(DocTreeValue::Root, vec![value_tree(j)])
}

/// The subtree for a single JSON value (no `Root` wrapper).
pub fn value_tree(j: &Value) -> DocTree {
    match j {
        Value::Array(items) => Tree::node(DocTreeValue::Array, items.iter().map(value_tree).collect()),
        Value::Object(map) => {
            let mut members: Vec<(&String, &Value)> = map.iter().collect();
            members.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
            Tree::node(DocTreeValue::Object, members.into_iter().map(|(k, v)| key_tree(k, v)).collect())
        }
        scalar => Tree::leaf(DocTreeValue::Scalar { v: scalar.clone() }),
    }
}

fn key_tree(key: &str, v: &Value) -> DocTree {
    Tree::node(DocTreeValue::Key { k: key.to_owned() }, vec![value_tree(v)])
}

pub fn tree_to_json(t: &DocTree) -> Result<Value, JsonModelError> {
    let malformed = |path: &AccessPath, reason| JsonModelError::MalformedTree { path: path.clone(), reason };
    let root = AccessPath::root();
    if t.value != DocTreeValue::Root {
        return Err(malformed(&root, "root node is not a document root"));
    }
    match t.children.as_slice() {
        [only] => read_value(only, &root.child(0)),
        _ => Err(malformed(&root, "document root must have exactly one child")),
    }
}

fn read_value(t: &DocTree, path: &AccessPath) -> Result<Value, JsonModelError> {
    let malformed = |reason| JsonModelError::MalformedTree { path: path.clone(), reason };
    match &t.value {
        DocTreeValue::Scalar { v } => {
            if !t.children.is_empty() {
                return Err(malformed("scalar node has children"));
            }
            if v.is_array() || v.is_object() {
                return Err(malformed("scalar node holds a container"));
            }
            Ok(v.clone())
        }
        DocTreeValue::Array => {
            let items = t
                .children
                .iter()
                .enumerate()
                .map(|(i, c)| read_value(c, &path.child(i)))
                .collect::<Result<_, _>>()?;
            Ok(Value::Array(items))
        }
        DocTreeValue::Object => {
            let mut map = Map::new();
            for (i, member) in t.children.iter().enumerate() {
                let member_path = path.child(i);
                let DocTreeValue::Key { k } = &member.value else {
                    return Err(JsonModelError::MalformedTree {
                        path: member_path,
                        reason: "object child is not a key node",
                    });
                };
                let [value] = member.children.as_slice() else {
                    return Err(JsonModelError::MalformedTree {
                        path: member_path,
                        reason: "key node must have exactly one child",
                    });
                };
                let v = read_value(value, &member_path.child(0))?;
                map.entry(k.clone()).or_insert(v);
            }
            Ok(Value::Object(map))
        }
        DocTreeValue::Key { .. } => Err(malformed("key node outside an object")),
        DocTreeValue::Root => Err(malformed("document root below the top")),
    }
}

fn container<'a>(doc: &'a DocTree, path: &AccessPath, want: DocTreeValue) -> Result<&'a DocTree, JsonModelError> {
    let expected = if want == DocTreeValue::Object { "object" } else { "array" };
    match doc.get(path) {
        Some(node) if node.value == want => Ok(node),
        _ => Err(JsonModelError::NoSuchContainer { path: path.clone(), expected }),
    }
}

fn key_of(t: &DocTree) -> Option<&str> {
    match &t.value {
        DocTreeValue::Key { k } => Some(k),
        _ => None,
    }
}

fn find_key(object: &DocTree, key: &str) -> Option<usize> {
    object.children.iter().position(|c| key_of(c) == Some(key))
}

/// First slot whose key sorts after `key`, scanning in sequence order.
fn sorted_slot<'a>(members: impl Iterator<Item = &'a DocTree>, key: &str) -> usize {
    let mut slot = 0;
    for m in members {
        if key_of(m).is_some_and(|k| k.as_bytes() > key.as_bytes()) {
            break;
        }
        slot += 1;
    }
    slot
}

/// Translates an edit into tree operations valid on `doc`. Setting an
/// existing key yields a delete followed by an insert; the insert is
/// relative to the document after the delete.
pub fn edit_to_op(doc: &DocTree, edit: &EditIntent) -> Result<Vec<TreeOp<DocTreeValue>>, JsonModelError> {
    match edit {
        EditIntent::SetKey { path, key, value } => {
            let object = container(doc, path, DocTreeValue::Object)?;
            let member = key_tree(key, value);
            match find_key(object, key) {
                Some(i) => {
                    let rest = object.children.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c);
                    let slot = sorted_slot(rest, key);
                    Ok(vec![TreeOp::delete(path.child(i)), TreeOp::insert(member, path.child(slot))])
                }
                None => {
                    let slot = sorted_slot(object.children.iter(), key);
                    Ok(vec![TreeOp::insert(member, path.child(slot))])
                }
            }
        }
        EditIntent::RemoveKey { path, key } => {
            let object = container(doc, path, DocTreeValue::Object)?;
            let i = find_key(object, key)
                .ok_or_else(|| JsonModelError::NoSuchKey { path: path.clone(), key: key.clone() })?;
            Ok(vec![TreeOp::delete(path.child(i))])
        }
        EditIntent::ArrayInsert { path, index, value } => {
            let array = container(doc, path, DocTreeValue::Array)?;
            if *index > array.children.len() {
                return Err(JsonModelError::IndexOutOfRange { path: path.clone(), index: *index, len: array.children.len() });
            }
            Ok(vec![TreeOp::insert(value_tree(value), path.child(*index))])
        }
        EditIntent::ArrayRemove { path, index } => {
            let array = container(doc, path, DocTreeValue::Array)?;
            if *index >= array.children.len() {
                return Err(JsonModelError::IndexOutOfRange { path: path.clone(), index: *index, len: array.children.len() });
            }
            Ok(vec![TreeOp::delete(path.child(*index))])
        }
    }
}
