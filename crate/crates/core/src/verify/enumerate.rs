use crate::list::ListDoc;
use crate::list_transform::ListOp;
use crate::tree::{AccessPath, Tree};
use crate::tree_transform::TreeOp;

use super::ConfigError;

/// Bounds for tree enumeration. Depth counts edges, so a single leaf has
/// depth 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumConfig<V> {
    pub max_nodes: usize,
    pub max_branch: usize,
    pub max_depth: usize,
    pub value_alphabet: Vec<V>,
    pub payload_pool: Vec<Tree<V>>,
}

impl<V> EnumConfig<V> {
    /// Node bound only; branching and depth are left unconstrained.
    pub fn with_nodes(max_nodes: usize, value_alphabet: Vec<V>, payload_pool: Vec<Tree<V>>) -> Self {
        EnumConfig {
            max_nodes,
            max_branch: max_nodes.max(1),
            max_depth: max_nodes.max(1),
            value_alphabet,
            payload_pool,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_nodes == 0 {
            return Err(ConfigError::ZeroBound("max_nodes"));
        }
        if self.max_branch == 0 {
            return Err(ConfigError::ZeroBound("max_branch"));
        }
        if self.max_depth == 0 {
            return Err(ConfigError::ZeroBound("max_depth"));
        }
        if self.value_alphabet.is_empty() {
            return Err(ConfigError::EmptyAlphabet);
        }
        Ok(())
    }
}

type Shape = Tree<()>;

/// Every ordered tree within the bounds, each once. Ordered by node count,
/// then by shape (preorder child counts, lexicographically), then by the
/// preorder value assignment.
pub fn enumerate_trees<V: Clone>(cfg: &EnumConfig<V>) -> Vec<Tree<V>> {
    if cfg.validate().is_err() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for n in 1..=cfg.max_nodes {
        let mut shapes = shapes(n, cfg.max_depth, cfg.max_branch);
        shapes.sort_by_cached_key(shape_key);
        for shape in &shapes {
            label_all(shape, &cfg.value_alphabet, &mut out);
        }
    }
    out
}

fn shape_key(shape: &Shape) -> Vec<usize> {
    fn walk(s: &Shape, out: &mut Vec<usize>) {
        out.push(s.children.len());
        s.children.iter().for_each(|c| walk(c, out));
    }
    let mut out = Vec::new();
    walk(shape, &mut out);
    out
}

fn shapes(n: usize, depth: usize, branch: usize) -> Vec<Shape> {
    if n == 1 {
        return vec![Tree::leaf(())];
    }
    if depth == 0 {
        return Vec::new();
    }
    forests(n - 1, branch, depth - 1, branch)
        .into_iter()
        .map(|children| Tree::node((), children))
        .collect()
}

/// Ordered forests of `m` nodes in at most `slots` trees, each within
/// `depth`.
fn forests(m: usize, slots: usize, depth: usize, branch: usize) -> Vec<Vec<Shape>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    if slots == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for k in 1..=m {
        let rests = forests(m - k, slots - 1, depth, branch);
        if rests.is_empty() {
            continue;
        }
        for first in shapes(k, depth, branch) {
            for rest in &rests {
                let mut forest = Vec::with_capacity(rest.len() + 1);
                forest.push(first.clone());
                forest.extend(rest.iter().cloned());
                out.push(forest);
            }
        }
    }
    out
}

fn label_all<V: Clone>(shape: &Shape, alphabet: &[V], out: &mut Vec<Tree<V>>) {
    let n = shape.node_count();
    let mut digits = vec![0usize; n];
    loop {
        let mut it = digits.iter();
        out.push(label(shape, alphabet, &mut it));
        // odometer, last preorder position fastest
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < alphabet.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn label<V: Clone>(shape: &Shape, alphabet: &[V], digits: &mut std::slice::Iter<'_, usize>) -> Tree<V> {
    let value = alphabet[*digits.next().expect("one digit per node")].clone();
    let children = shape.children.iter().map(|c| label(c, alphabet, digits)).collect();
    Tree { value, children }
}

/// Every valid operation on `tree`: for each payload, an insert at every
/// slot of every node (nodes in preorder); then a delete of every non-root
/// node in preorder.
pub fn enumerate_valid_ops<V: Clone>(tree: &Tree<V>, payloads: &[Tree<V>]) -> Vec<TreeOp<V>> {
    let nodes = tree.node_paths();
    let mut ops = Vec::new();
    for payload in payloads {
        for node in &nodes {
            let count = tree.get(node).map_or(0, |n| n.children.len());
            for slot in 0..=count {
                ops.push(TreeOp::insert(payload.clone(), node.child(slot)));
            }
        }
    }
    ops.extend(nodes.into_iter().filter(|p| !p.is_empty()).map(|p: AccessPath| TreeOp::delete(p)));
    ops
}

/// All lists up to `max_len` items, shortest first.
pub fn enumerate_lists<T: Clone>(max_len: usize, alphabet: &[T]) -> Vec<ListDoc<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    let mut layer: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|l| {
                alphabet.iter().map(move |a| {
                    let mut next = l.clone();
                    next.push(a.clone());
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out.into_iter().map(ListDoc::from).collect()
}

/// Inserts of each symbol at each slot, then every delete.
pub fn enumerate_list_ops<T: Clone>(list: &ListDoc<T>, alphabet: &[T]) -> Vec<ListOp<T>> {
    let mut ops: Vec<ListOp<T>> = alphabet
        .iter()
        .flat_map(|item| (0..=list.len()).map(move |pos| ListOp::InsertL { item: item.clone(), pos }))
        .collect();
    ops.extend((0..list.len()).map(|pos| ListOp::DeleteL { pos }));
    ops
}
