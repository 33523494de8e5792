use crate::site::SiteId;
use crate::tree::{delete_t, is_valid, AccessPath, Tree};
use crate::tree_transform::TreeOp;

use super::tp1::{check_tp1_with, counterexample, Counterexample, Tp1Verdict};

/// Greedily shrinks a violating case while it keeps violating: first by
/// dropping subtrees of the context (rightmost first), then by shortening
/// operation paths. Returns the first fixpoint reached.
pub fn shrink_counterexample<V, X>(cx: Counterexample<Tree<V>, TreeOp<V>>, xform: &X) -> Counterexample<Tree<V>, TreeOp<V>>
where
    V: Clone + PartialEq,
    X: Fn(&TreeOp<V>, SiteId, &TreeOp<V>, SiteId) -> (TreeOp<V>, TreeOp<V>),
{
    let mut cur = cx;
    while let Some(next) = shrink_step(&cur, xform) {
        cur = next;
    }
    cur
}

fn violation<V, X>(ctx: &Tree<V>, o1: &TreeOp<V>, s1: SiteId, o2: &TreeOp<V>, s2: SiteId, xform: &X) -> Option<Tp1Verdict<Tree<V>>>
where
    V: Clone + PartialEq,
    X: Fn(&TreeOp<V>, SiteId, &TreeOp<V>, SiteId) -> (TreeOp<V>, TreeOp<V>),
{
    if !is_valid(o1, ctx) || !is_valid(o2, ctx) {
        return None;
    }
    let v = check_tp1_with(xform, o1, s1, o2, s2, ctx);
    (!v.holds()).then_some(v)
}

fn shrink_step<V, X>(cx: &Counterexample<Tree<V>, TreeOp<V>>, xform: &X) -> Option<Counterexample<Tree<V>, TreeOp<V>>>
where
    V: Clone + PartialEq,
    X: Fn(&TreeOp<V>, SiteId, &TreeOp<V>, SiteId) -> (TreeOp<V>, TreeOp<V>),
{
    let (s1, s2) = (cx.s1, cx.s2);
    for path in cx.context.node_paths().into_iter().skip(1).rev() {
        let Ok(smaller) = delete_t(&path, &cx.context) else { continue };
        if let Some(v) = violation(&smaller, &cx.o1, s1, &cx.o2, s2, xform) {
            return Some(counterexample(&smaller, &cx.o1, s1, &cx.o2, s2, v));
        }
    }
    let shorter = |op: &TreeOp<V>| -> Option<TreeOp<V>> {
        let path = op.path()?;
        (path.len() >= 2).then(|| op.clone().with_path(AccessPath::from(&path[..path.len() - 1])))
    };
    if let Some(o1) = shorter(&cx.o1) {
        if let Some(v) = violation(&cx.context, &o1, s1, &cx.o2, s2, xform) {
            return Some(counterexample(&cx.context, &o1, s1, &cx.o2, s2, v));
        }
    }
    if let Some(o2) = shorter(&cx.o2) {
        if let Some(v) = violation(&cx.context, &cx.o1, s1, &o2, s2, xform) {
            return Some(counterexample(&cx.context, &cx.o1, s1, &o2, s2, v));
        }
    }
    None
}
