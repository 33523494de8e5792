//! Operational transformation for lists and ordered n-ary trees.
//!
//! The crate is organised bottom-up:
//!
//! - [`list`] and [`list_transform`]: list primitives and their pairwise
//!   transformation.
//! - [`tree`] and [`tree_transform`]: trees addressed by access paths,
//!   insert/delete on them, and the tree transformation function.
//! - [`verify`]: exhaustive and randomized convergence checking.
//! - [`json_model`]: mapping between JSON documents and trees.
//! - [`sync`]: a server-ordered replication protocol and its op log.

pub mod json_model;
pub mod list;
pub mod list_transform;
pub mod site;
pub mod sync;
pub mod tree;
pub mod tree_transform;
pub mod verify;

pub use list::{delete_l, insert_l, is_prefix, slice, ListDoc, ListError};
pub use list_transform::{apply_list, xform_l, ListOp};
pub use site::{PriorityPolicy, SiteId};
pub use tree::{
    decompose_delete, decompose_insert, delete_t, insert_t, is_valid, subtree, AccessPath, Tree, TreeError,
};
pub use tree_transform::{
    apply_tree, effect_independent, transformation_point, update_minus, update_plus, xform_t, TreeOp,
};
