//! Embeds lists as the child sequence of a root node, so that list
//! operations become depth-one tree operations.

use crate::list::ListDoc;
use crate::list_transform::ListOp;
use crate::tree::Tree;
use crate::tree_transform::TreeOp;

pub fn to_tree<T: Clone>(root: T, list: &ListDoc<T>) -> Tree<T> {
    Tree::node(root, list.iter().cloned().map(Tree::leaf).collect())
}

pub fn to_tree_op<T: Clone>(op: &ListOp<T>) -> TreeOp<T> {
    match op {
        ListOp::InsertL { item, pos } => TreeOp::insert(Tree::leaf(item.clone()), [*pos]),
        ListOp::DeleteL { pos } => TreeOp::delete([*pos]),
        ListOp::NoOp => TreeOp::NoOp,
    }
}
