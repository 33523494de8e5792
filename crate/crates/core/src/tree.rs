//! Ordered n-ary trees addressed by access paths.
//!
//! A tree is a value plus an ordered list of child trees, so the smallest
//! tree is a single leaf. An [`AccessPath`] is a list of child indices; the
//! empty path addresses the root. For insertion the last index names a slot
//! in the child list of the node addressed by the rest of the path.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::list::{self, head_before, tail_from};
use crate::tree_transform::TreeOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("no node at {0}")]
    NoSuchNode(AccessPath),
    #[error("path {0} is not valid for this operation")]
    InvalidPath(AccessPath),
    #[error("operation requires a non-empty access path")]
    EmptyPath,
    #[error("index {index} out of bounds for path of length {len}")]
    IndexOutOfBounds { index: usize, len: usize },
    #[error("cannot decrement element {index} of {path}: already zero")]
    Underflow { path: AccessPath, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tree<V> {
    #[serde(rename = "v")]
    pub value: V,
    #[serde(rename = "c")]
    pub children: Vec<Tree<V>>,
}

impl<V> Tree<V> {
    pub fn leaf(value: V) -> Self {
        Tree { value, children: Vec::new() }
    }

    pub fn node(value: V, children: Vec<Tree<V>>) -> Self {
        Tree { value, children }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Tree::node_count).sum::<usize>()
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    pub fn max_branching(&self) -> usize {
        self.children
            .iter()
            .map(Tree::max_branching)
            .chain(std::iter::once(self.children.len()))
            .max()
            .unwrap_or(0)
    }

    /// Paths of every node in preorder, root (the empty path) first.
    pub fn node_paths(&self) -> Vec<AccessPath> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.collect_paths(&mut prefix, &mut out);
        out
    }

    fn collect_paths(&self, prefix: &mut Vec<usize>, out: &mut Vec<AccessPath>) {
        out.push(AccessPath(prefix.clone()));
        for (i, child) in self.children.iter().enumerate() {
            prefix.push(i);
            child.collect_paths(prefix, out);
            prefix.pop();
        }
    }

    pub fn get(&self, path: &[usize]) -> Option<&Tree<V>> {
        path.iter().try_fold(self, |node, &i| node.children.get(i))
    }
}

impl<V: fmt::Display> fmt::Display for Tree<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        if !self.children.is_empty() {
            write!(f, "(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A sequence of child indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccessPath(pub Vec<usize>);

impl AccessPath {
    pub fn root() -> Self {
        AccessPath(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `pos[<i]`
    pub fn before(&self, i: usize) -> AccessPath {
        AccessPath(head_before(&self.0, i).to_vec())
    }

    /// `pos[>=i]`
    pub fn from_index(&self, i: usize) -> AccessPath {
        AccessPath(tail_from(&self.0, i).to_vec())
    }

    pub fn child(&self, i: usize) -> AccessPath {
        let mut v = self.0.clone();
        v.push(i);
        AccessPath(v)
    }

    /// Whether `self` starts with `other`.
    pub fn starts_with(&self, other: &AccessPath) -> bool {
        list::starts_with(&self.0, &other.0)
    }
}

impl std::ops::Deref for AccessPath {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for AccessPath {
    fn from(v: Vec<usize>) -> Self {
        AccessPath(v)
    }
}

impl<const N: usize> From<[usize; N]> for AccessPath {
    fn from(v: [usize; N]) -> Self {
        AccessPath(v.to_vec())
    }
}

impl From<&[usize]> for AccessPath {
    fn from(v: &[usize]) -> Self {
        AccessPath(v.to_vec())
    }
}

impl fmt::Display for AccessPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// The subtree at `pos`; the empty path yields the whole tree.
pub fn subtree<'a, V>(tree: &'a Tree<V>, pos: &AccessPath) -> Result<&'a Tree<V>, TreeError> {
    tree.get(pos).ok_or_else(|| TreeError::NoSuchNode(pos.clone()))
}

/// Inserts `t` so that it ends up at `pos`.
pub fn insert_t<V: Clone>(t: Tree<V>, pos: &AccessPath, tree: &Tree<V>) -> Result<Tree<V>, TreeError> {
    if pos.is_empty() {
        return Err(TreeError::EmptyPath);
    }
    insert_rec(t, pos, tree).ok_or_else(|| TreeError::InvalidPath(pos.clone()))
}

fn insert_rec<V: Clone>(t: Tree<V>, pos: &[usize], tree: &Tree<V>) -> Option<Tree<V>> {
    let children = match pos {
        [] => return None,
        [x] => list::insert_slice(t, *x, &tree.children).ok()?,
        [x, rest @ ..] => {
            let inner = insert_rec(t, rest, tree.children.get(*x)?)?;
            let without = list::delete_slice(*x, &tree.children).ok()?;
            list::insert_slice(inner, *x, &without).ok()?
        }
    };
    Some(Tree { value: tree.value.clone(), children })
}

/// Removes the subtree at `pos`; later siblings shift left by one.
pub fn delete_t<V: Clone>(pos: &AccessPath, tree: &Tree<V>) -> Result<Tree<V>, TreeError> {
    if pos.is_empty() {
        return Err(TreeError::EmptyPath);
    }
    delete_rec(pos, tree).ok_or_else(|| TreeError::InvalidPath(pos.clone()))
}

fn delete_rec<V: Clone>(pos: &[usize], tree: &Tree<V>) -> Option<Tree<V>> {
    let children = match pos {
        [] => return None,
        [x] => list::delete_slice(*x, &tree.children).ok()?,
        [x, rest @ ..] => {
            let inner = delete_rec(rest, tree.children.get(*x)?)?;
            let without = list::delete_slice(*x, &tree.children).ok()?;
            list::insert_slice(inner, *x, &without).ok()?
        }
    };
    Some(Tree { value: tree.value.clone(), children })
}

/// Whether `pos` is an insertion slot in `tree`: everything but the last
/// index addresses a node, and the last index is at most its child count.
pub fn is_insert_slot<V>(pos: &[usize], tree: &Tree<V>) -> bool {
    match pos.split_last() {
        Some((&slot, parent)) => tree.get(parent).is_some_and(|p| slot <= p.children.len()),
        None => false,
    }
}

/// Whether `pos` addresses an existing non-root node.
pub fn is_deletable<V>(pos: &[usize], tree: &Tree<V>) -> bool {
    !pos.is_empty() && tree.get(pos).is_some()
}

pub fn is_valid<V>(op: &TreeOp<V>, tree: &Tree<V>) -> bool {
    match op {
        TreeOp::InsertT { path, .. } => is_insert_slot(path, tree),
        TreeOp::DeleteT { path } => is_deletable(path, tree),
        TreeOp::NoOp => true,
    }
}

fn check_split(pos: &AccessPath, i: usize) -> Result<(), TreeError> {
    if i == 0 || i >= pos.len() {
        return Err(TreeError::IndexOutOfBounds { index: i, len: pos.len() });
    }
    Ok(())
}

/// Inserts `t` at `pos` by splitting the path at `i`: the subtree at
/// `pos[<i]` is cut out, receives `t` at `pos[>=i]`, and is put back.
/// Always equal to `insert_t(t, pos, tree)`.
pub fn decompose_insert<V: Clone>(
    t: Tree<V>,
    pos: &AccessPath,
    tree: &Tree<V>,
    i: usize,
) -> Result<Tree<V>, TreeError> {
    check_split(pos, i)?;
    let (outer, inner) = (pos.before(i), pos.from_index(i));
    let cut = subtree(tree, &outer)?;
    let grown = insert_t(t, &inner, cut)?;
    insert_t(grown, &outer, &delete_t(&outer, tree)?)
}

/// Deletion counterpart of [`decompose_insert`].
pub fn decompose_delete<V: Clone>(pos: &AccessPath, tree: &Tree<V>, i: usize) -> Result<Tree<V>, TreeError> {
    check_split(pos, i)?;
    let (outer, inner) = (pos.before(i), pos.from_index(i));
    let cut = subtree(tree, &outer)?;
    let shrunk = delete_t(&inner, cut)?;
    insert_t(shrunk, &outer, &delete_t(&outer, tree)?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Parses the `A(B,C(D))` notation; node values are single characters.
    pub(crate) fn t(s: &str) -> Tree<char> {
        fn parse(chars: &[char], at: &mut usize) -> Tree<char> {
            let value = chars[*at];
            *at += 1;
            let mut children = Vec::new();
            if chars.get(*at) == Some(&'(') {
                *at += 1;
                loop {
                    children.push(parse(chars, at));
                    let c = chars[*at];
                    *at += 1;
                    if c == ')' {
                        break;
                    }
                }
            }
            Tree { value, children }
        }
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut at = 0;
        let tree = parse(&chars, &mut at);
        assert_eq!(at, chars.len(), "trailing input in {s}");
        tree
    }

    fn p<const N: usize>(v: [usize; N]) -> AccessPath {
        AccessPath::from(v)
    }

    #[test]
    fn notation_round_trips() {
        for s in ["A", "A(B,C(D))", "A(B(D,E),C(F))"] {
            assert_eq!(t(s).to_string(), s);
        }
    }

    #[test]
    fn subtree_examples() {
        let fig = t("A(B(D,E),C(F))");
        assert_eq!(subtree(&fig, &p([0, 1])).unwrap(), &t("E"));
        assert_eq!(subtree(&fig, &p([1, 0])).unwrap(), &t("F"));
        assert_eq!(subtree(&fig, &AccessPath::root()).unwrap(), &fig);
        assert_eq!(subtree(&t("A(B,C)"), &p([2])), Err(TreeError::NoSuchNode(p([2]))));
    }

    #[test]
    fn insert_examples() {
        assert_eq!(insert_t(t("X"), &p([1]), &t("A(B,C)")).unwrap(), t("A(B,X,C)"));
        assert_eq!(insert_t(t("E"), &p([1, 0, 0]), &t("A(B,C(D))")).unwrap(), t("A(B,C(D(E)))"));
        assert_eq!(insert_t(t("X"), &p([0, 5]), &t("A(B)")), Err(TreeError::InvalidPath(p([0, 5]))));
        assert_eq!(insert_t(t("X"), &AccessPath::root(), &t("A")), Err(TreeError::EmptyPath));
    }

    #[test]
    fn delete_examples() {
        assert_eq!(delete_t(&p([1]), &t("A(B,C(D))")).unwrap(), t("A(B)"));
        assert_eq!(delete_t(&p([0, 1]), &t("A(B(D,E),C)")).unwrap(), t("A(B(D),C)"));
        assert_eq!(delete_t(&AccessPath::root(), &t("A(B)")), Err(TreeError::EmptyPath));
        assert_eq!(delete_t(&p([3]), &t("A(B)")), Err(TreeError::InvalidPath(p([3]))));
    }

    #[test]
    fn validity_examples() {
        let ab_c = t("A(B,C)");
        assert!(is_valid(&TreeOp::InsertT { path: p([2]), tree: t("t") }, &ab_c));
        assert!(!is_valid(&TreeOp::DeleteT { path: p([2]) }, &ab_c));
        assert!(is_valid(&TreeOp::InsertT { path: p([0, 0]), tree: t("t") }, &t("A(B)")));
        assert!(!is_valid(&TreeOp::InsertT { path: AccessPath::root(), tree: t("t") }, &t("A(B)")));
        assert!(!is_valid(&TreeOp::DeleteT { path: AccessPath::root() }, &t("A(B)")));
        assert!(is_valid(&TreeOp::NoOp, &t("A")));
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(
            decompose_insert(t("E"), &p([1, 0, 0]), &t("A(B,C(D))"), 1).unwrap(),
            t("A(B,C(D(E)))")
        );
        assert_eq!(
            decompose_insert(t("E"), &p([1, 0, 0]), &t("A(B,C(D))"), 2).unwrap(),
            t("A(B,C(D(E)))")
        );
        assert_eq!(decompose_insert(t("X"), &p([0, 0]), &t("A(B)"), 1).unwrap(), t("A(B(X))"));
        assert_eq!(
            decompose_insert(t("X"), &p([0]), &t("A(B)"), 1),
            Err(TreeError::IndexOutOfBounds { index: 1, len: 1 })
        );
        assert!(matches!(
            decompose_insert(t("X"), &p([0, 0]), &t("A(B)"), 0),
            Err(TreeError::IndexOutOfBounds { .. })
        ));
        assert_eq!(decompose_delete(&p([1, 0]), &t("A(B,C(D))"), 1).unwrap(), t("A(B,C)"));
        assert_eq!(decompose_delete(&p([0, 0]), &t("A(B(D))"), 1).unwrap(), t("A(B)"));
        assert!(matches!(decompose_delete(&p([0]), &t("A(B)"), 1), Err(TreeError::IndexOutOfBounds { .. })));
    }

    #[test]
    fn tree_encoding() {
        let json = serde_json::to_string(&t("A(B)")).unwrap();
        assert_eq!(json, r#"{"v":"A","c":[{"v":"B","c":[]}]}"#);
        let back: Tree<char> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t("A(B)"));
        assert!(serde_json::from_str::<Tree<char>>(r#"{"v":"A"}"#).is_err());
    }

    #[test]
    fn shape_metrics() {
        let fig = t("A(B(D,E),C(F))");
        assert_eq!(fig.node_count(), 6);
        assert_eq!(fig.depth(), 2);
        assert_eq!(fig.max_branching(), 2);
        assert_eq!(t("A").depth(), 0);
        let paths: Vec<String> = fig.node_paths().iter().map(|p| p.to_string()).collect();
        assert_eq!(paths, ["[]", "[0]", "[0,0]", "[0,1]", "[1]", "[1,0]"]);
    }
}
