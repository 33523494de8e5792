//! Tree operations and the tree transformation function.
//!
//! The transformation works purely on access paths. For two paths it finds
//! the transformation point (the first index where they differ, or the end
//! of the shorter one), decides whether the operations can affect each
//! other at all, and if so adjusts one path at that index exactly like the
//! list transformation adjusts positions.

use serde::{Deserialize, Serialize};

use crate::site::{PriorityPolicy, SiteId};
use crate::tree::{delete_t, insert_t, AccessPath, Tree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "snake_case",
    try_from = "RawTreeOp<V>",
    bound(deserialize = "V: Deserialize<'de>")
)]
pub enum TreeOp<V> {
    InsertT { path: AccessPath, tree: Tree<V> },
    DeleteT { path: AccessPath },
    NoOp,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawTreeOp<V> {
    InsertT { path: AccessPath, tree: Tree<V> },
    DeleteT { path: AccessPath },
    NoOp,
}

impl<V> TryFrom<RawTreeOp<V>> for TreeOp<V> {
    type Error = TreeError;

    fn try_from(raw: RawTreeOp<V>) -> Result<Self, TreeError> {
        match raw {
            RawTreeOp::InsertT { path, .. } | RawTreeOp::DeleteT { path } if path.is_empty() => {
                Err(TreeError::EmptyPath)
            }
            RawTreeOp::InsertT { path, tree } => Ok(TreeOp::InsertT { path, tree }),
            RawTreeOp::DeleteT { path } => Ok(TreeOp::DeleteT { path }),
            RawTreeOp::NoOp => Ok(TreeOp::NoOp),
        }
    }
}

impl<V> TreeOp<V> {
    pub fn insert(tree: Tree<V>, path: impl Into<AccessPath>) -> Self {
        TreeOp::InsertT { path: path.into(), tree }
    }

    pub fn delete(path: impl Into<AccessPath>) -> Self {
        TreeOp::DeleteT { path: path.into() }
    }

    pub fn path(&self) -> Option<&AccessPath> {
        match self {
            TreeOp::InsertT { path, .. } | TreeOp::DeleteT { path } => Some(path),
            TreeOp::NoOp => None,
        }
    }

    pub fn is_noop(&self) -> bool {
        matches!(self, TreeOp::NoOp)
    }

    pub fn with_path(self, path: AccessPath) -> Self {
        match self {
            TreeOp::InsertT { tree, .. } => TreeOp::InsertT { path, tree },
            TreeOp::DeleteT { .. } => TreeOp::DeleteT { path },
            TreeOp::NoOp => TreeOp::NoOp,
        }
    }
}

/// Applies `op` to `tree`, returning the new tree.
pub fn apply_tree<V: Clone>(op: &TreeOp<V>, tree: &Tree<V>) -> Result<Tree<V>, TreeError> {
    match op {
        TreeOp::InsertT { path, tree: t } => insert_t(t.clone(), path, tree),
        TreeOp::DeleteT { path } => delete_t(path, tree),
        TreeOp::NoOp => Ok(tree.clone()),
    }
}

/// Index of the first difference between two non-empty paths. When one
/// path is a prefix of the other, the index of the last element of the
/// shorter one.
pub fn transformation_point(p1: &AccessPath, p2: &AccessPath) -> Result<usize, TreeError> {
    if p1.is_empty() || p2.is_empty() {
        return Err(TreeError::EmptyPath);
    }
    let shorter = p1.len().min(p2.len());
    Ok(p1.iter().zip(p2.iter()).position(|(a, b)| a != b).unwrap_or(shorter - 1))
}

/// Whether operations at `p1` and `p2` commute without transformation:
/// both reach below the transformation point, or the shorter one acts to
/// the right of the longer one's branch.
pub fn effect_independent(p1: &AccessPath, p2: &AccessPath) -> Result<bool, TreeError> {
    let tp = transformation_point(p1, p2)?;
    let (a, b) = (p1[tp], p2[tp]);
    Ok((p1.len() > tp + 1 && p2.len() > tp + 1)
        || (a > b && p1.len() < p2.len())
        || (a < b && p1.len() > p2.len()))
}

pub fn update_plus(pos: &AccessPath, n: usize) -> Result<AccessPath, TreeError> {
    let mut out = pos.clone();
    match out.0.get_mut(n) {
        Some(x) => *x += 1,
        None => return Err(TreeError::IndexOutOfBounds { index: n, len: pos.len() }),
    }
    Ok(out)
}

pub fn update_minus(pos: &AccessPath, n: usize) -> Result<AccessPath, TreeError> {
    let mut out = pos.clone();
    match out.0.get_mut(n) {
        Some(0) => return Err(TreeError::Underflow { path: pos.clone(), index: n }),
        Some(x) => *x -= 1,
        None => return Err(TreeError::IndexOutOfBounds { index: n, len: pos.len() }),
    }
    Ok(out)
}

// Inside the transformation the point is always within both paths and a
// decrement only ever hits an index strictly greater than the other
// path's, so these cannot fail.
fn plus(pos: &AccessPath, n: usize) -> AccessPath {
    update_plus(pos, n).expect("transformation point within path")
}

fn minus(pos: &AccessPath, n: usize) -> AccessPath {
    update_minus(pos, n).expect("decrement of a strictly greater index")
}

fn point_and_independence(p1: &AccessPath, p2: &AccessPath) -> (usize, bool) {
    let tp = transformation_point(p1, p2).expect("tree operations carry non-empty paths");
    let independent = effect_independent(p1, p2).expect("tree operations carry non-empty paths");
    (tp, independent)
}

/// Transforms two tree operations generated against the same tree.
///
/// Returns `(o1', o2')` where `o1'` applies after `o2` and `o2'` after `o1`.
/// Two inserts at an identical path are ordered by site: the lower site id
/// keeps its path. `NoOp` in either slot passes both operations through.
///
/// # Panics
///
/// If an insert or delete carries an empty path.
pub fn xform_t<V: Clone>(o1: &TreeOp<V>, s1: SiteId, o2: &TreeOp<V>, s2: SiteId) -> (TreeOp<V>, TreeOp<V>) {
    use TreeOp::*;

    match (o1, o2) {
        (NoOp, _) | (_, NoOp) => (o1.clone(), o2.clone()),
        (InsertT { path: p1, tree: t1 }, InsertT { path: p2, tree: t2 }) => {
            let (q1, q2) = insert_insert(p1, s1, p2, s2);
            (TreeOp::insert(t1.clone(), q1), TreeOp::insert(t2.clone(), q2))
        }
        (DeleteT { path: p1 }, DeleteT { path: p2 }) => delete_delete(p1, p2),
        (InsertT { path: p1, tree }, DeleteT { path: p2 }) => insert_delete(tree, p1, p2),
        (DeleteT { path: p1 }, InsertT { path: p2, tree }) => {
            let (ins, del) = insert_delete(tree, p2, p1);
            (del, ins)
        }
    }
}

fn insert_insert(p1: &AccessPath, s1: SiteId, p2: &AccessPath, s2: SiteId) -> (AccessPath, AccessPath) {
    let (tp, independent) = point_and_independence(p1, p2);
    if independent {
        return (p1.clone(), p2.clone());
    }
    let first_moves = if p1[tp] != p2[tp] {
        p1[tp] > p2[tp]
    } else if p1.len() != p2.len() {
        p1.len() > p2.len()
    } else {
        !PriorityPolicy::default().first_wins(s1, s2)
    };
    if first_moves {
        (plus(p1, tp), p2.clone())
    } else {
        (p1.clone(), plus(p2, tp))
    }
}

fn delete_delete<V>(p1: &AccessPath, p2: &AccessPath) -> (TreeOp<V>, TreeOp<V>) {
    let (tp, independent) = point_and_independence(p1, p2);
    let del = |p: AccessPath| TreeOp::DeleteT { path: p };
    if independent {
        (del(p1.clone()), del(p2.clone()))
    } else if p1[tp] > p2[tp] {
        (del(minus(p1, tp)), del(p2.clone()))
    } else if p1[tp] < p2[tp] {
        (del(p1.clone()), del(minus(p2, tp)))
    } else if p1.len() > p2.len() {
        // p1 lies inside the subtree p2 removes
        (TreeOp::NoOp, del(p2.clone()))
    } else if p1.len() < p2.len() {
        (del(p1.clone()), TreeOp::NoOp)
    } else {
        (TreeOp::NoOp, TreeOp::NoOp)
    }
}

/// Insert at `p1` against delete at `p2`; the result is `(insert', delete')`.
fn insert_delete<V: Clone>(t: &Tree<V>, p1: &AccessPath, p2: &AccessPath) -> (TreeOp<V>, TreeOp<V>) {
    let (tp, independent) = point_and_independence(p1, p2);
    let ins = |p: AccessPath| TreeOp::insert(t.clone(), p);
    let del = |p: AccessPath| TreeOp::DeleteT { path: p };
    if independent {
        (ins(p1.clone()), del(p2.clone()))
    } else if p1[tp] > p2[tp] {
        (ins(minus(p1, tp)), del(p2.clone()))
    } else if p1[tp] < p2[tp] {
        (ins(p1.clone()), del(plus(p2, tp)))
    } else if p1.len() > p2.len() {
        // insert into the deleted subtree
        (TreeOp::NoOp, del(p2.clone()))
    } else {
        (ins(p1.clone()), del(plus(p2, tp)))
    }
}
