//! Scripted two-client sessions.
//!
//! The XYZ session: a shared parent with children X, Y, Z. Site 1 inserts
//! A before X while site 2 concurrently deletes Y. Whichever reaches the
//! server second is transformed (the delete's position moves from 1 to 2,
//! or the insert stays at 0), and every replica ends with A, X, Z.

use crate::site::SiteId;
use crate::sync::{Broadcast, ClientState, ServerState, SyncError};
use crate::tree::Tree;
use crate::tree_transform::TreeOp;

/// Final documents of a scripted session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioOutcome<V> {
    pub server: Tree<V>,
    pub clients: Vec<Tree<V>>,
}

impl<V: PartialEq> ScenarioOutcome<V> {
    pub fn converged(&self) -> bool {
        self.clients.iter().all(|c| *c == self.server)
    }
}

pub fn xyz_initial() -> Tree<char> {
    Tree::node('R', vec![Tree::leaf('X'), Tree::leaf('Y'), Tree::leaf('Z')])
}

pub fn xyz_expected() -> Tree<char> {
    Tree::node('R', vec![Tree::leaf('A'), Tree::leaf('X'), Tree::leaf('Z')])
}

/// Runs the XYZ session. `insert_first` picks which edit the server
/// receives first; broadcasts are delivered after both edits were made.
pub fn replay_xyz(insert_first: bool) -> Result<ScenarioOutcome<char>, SyncError> {
    let initial = xyz_initial();
    let mut server = ServerState::new(initial.clone());
    let mut c1 = ClientState::new(SiteId(1), initial.clone(), 0);
    let mut c2 = ClientState::new(SiteId(2), initial, 0);

    let ins = c1.local_edit(TreeOp::insert(Tree::leaf('A'), [0]))?;
    let del = c2.local_edit(TreeOp::delete([1]))?;

    let order = if insert_first { [ins, del] } else { [del, ins] };
    let broadcasts: Vec<Broadcast<char>> = order.iter().map(|e| server.ingest(e)).collect::<Result<_, _>>()?;
    for b in &broadcasts {
        c1.ingest_remote(b)?;
        c2.ingest_remote(b)?;
    }
    Ok(ScenarioOutcome { server: server.doc().clone(), clients: vec![c1.doc().clone(), c2.doc().clone()] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xyz_both_orders() {
        for insert_first in [true, false] {
            let out = replay_xyz(insert_first).unwrap();
            assert_eq!(out.server, xyz_expected());
            assert!(out.converged());
        }
    }

    #[test]
    fn intermediate_states() {
        // Each site sees its own edit first: A,X,Y,Z and X,Z.
        let initial = xyz_initial();
        let mut c1 = ClientState::new(SiteId(1), initial.clone(), 0);
        let mut c2 = ClientState::new(SiteId(2), initial, 0);
        c1.local_edit(TreeOp::insert(Tree::leaf('A'), [0])).unwrap();
        c2.local_edit(TreeOp::delete([1])).unwrap();
        assert_eq!(c1.doc().to_string(), "R(A,X,Y,Z)");
        assert_eq!(c2.doc().to_string(), "R(X,Z)");
    }
}
