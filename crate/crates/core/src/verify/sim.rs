//! Randomized end-to-end sessions over the in-memory server and clients.
//!
//! Each session has its own RNG stream derived from the seed, so sessions
//! are independent and the report does not depend on scheduling.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::site::SiteId;
use crate::sync::{Broadcast, ClientState, OpEnvelope, ServerState, SyncError};
use crate::tree::{insert_t, AccessPath, Tree};
use crate::tree_transform::{apply_tree, TreeOp};

use super::enumerate::enumerate_valid_ops;
use super::ConfigError;

const VALUES: &[char] = &['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h'];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub min_clients: usize,
    pub max_clients: usize,
    /// Local edits made by each client.
    pub max_ops: usize,
    pub sessions: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_clients > self.max_clients {
            return Err(ConfigError::EmptyClientRange(self.min_clients, self.max_clients));
        }
        if self.min_clients < 2 {
            return Err(ConfigError::TooFewClients { min: 2, got: self.min_clients });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub session: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub seed: u64,
    pub sessions: usize,
    pub converged: usize,
    /// Per session, a short SHA-256 prefix of the final server document's
    /// JSON encoding.
    pub digests: Vec<String>,
    pub divergences: Vec<Divergence>,
}

impl SimReport {
    pub fn from_outcomes(cfg: &SimConfig, outcomes: &[SessionOutcome]) -> Self {
        SimReport {
            seed: cfg.seed,
            sessions: outcomes.len(),
            converged: outcomes.iter().filter(|o| o.converged).count(),
            digests: outcomes.iter().map(|o| o.digest.clone()).collect(),
            divergences: outcomes
                .iter()
                .filter(|o| !o.converged)
                .map(|o| Divergence { session: o.session, error: o.error.clone(), trace: o.trace.clone() })
                .collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.converged == self.sessions
    }
}

/// One session's result, including its full event trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub session: usize,
    pub clients: usize,
    pub converged: bool,
    pub digest: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub trace: Vec<String>,
}

pub fn simulate_sessions(cfg: &SimConfig) -> Result<SimReport, ConfigError> {
    Ok(SimReport::from_outcomes(cfg, &simulate_with_traces(cfg)?))
}

pub fn simulate_with_traces(cfg: &SimConfig) -> Result<Vec<SessionOutcome>, ConfigError> {
    cfg.validate()?;
    Ok((0..cfg.sessions).into_par_iter().map(|i| run_session(cfg, i)).collect())
}

pub fn run_session(cfg: &SimConfig, session: usize) -> SessionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(session as u64);
    let n_clients = rng.random_range(cfg.min_clients..=cfg.max_clients);
    let mut s = Session::new(&mut rng, n_clients, cfg.max_ops);
    let result = s.run(&mut rng);
    let digest = digest(s.server.doc());
    let (converged, error) = match result {
        Ok(()) => match s.check_quiescent() {
            Ok(()) => (true, None),
            Err(msg) => (false, Some(msg)),
        },
        Err(msg) => (false, Some(msg)),
    };
    SessionOutcome { session, clients: n_clients, converged, digest, error, trace: s.trace }
}

fn digest(doc: &Tree<char>) -> String {
    let bytes = serde_json::to_vec(doc).expect("tree encodes");
    hex::encode(&Sha256::digest(&bytes)[..8])
}

fn random_value(rng: &mut ChaCha8Rng) -> char {
    *VALUES.choose(rng).expect("non-empty")
}

fn random_tree(rng: &mut ChaCha8Rng) -> Tree<char> {
    let mut t = Tree::leaf('r');
    for _ in 0..rng.random_range(0..=4) {
        let slots: Vec<AccessPath> = t
            .node_paths()
            .into_iter()
            .flat_map(|p| {
                let n = t.get(&p).map_or(0, |node| node.children.len());
                (0..=n).map(move |i| p.child(i))
            })
            .collect();
        let slot = slots.choose(rng).expect("a tree has slots").clone();
        t = insert_t(Tree::leaf(random_value(rng)), &slot, &t).expect("slot is valid");
    }
    t
}

fn random_payload(rng: &mut ChaCha8Rng) -> Tree<char> {
    if rng.random_bool(0.75) {
        Tree::leaf(random_value(rng))
    } else {
        Tree::node(random_value(rng), vec![Tree::leaf(random_value(rng))])
    }
}

fn random_op(rng: &mut ChaCha8Rng, doc: &Tree<char>) -> TreeOp<char> {
    let payload = random_payload(rng);
    let ops = enumerate_valid_ops(doc, std::slice::from_ref(&payload));
    let (inserts, deletes): (Vec<_>, Vec<_>) = ops.into_iter().partition(|o| matches!(o, TreeOp::InsertT { .. }));
    if !deletes.is_empty() && rng.random_bool(0.4) {
        deletes.choose(rng).expect("non-empty").clone()
    } else {
        inserts.choose(rng).expect("every tree has an insert slot").clone()
    }
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Edit(usize),
    Receive(usize),
    Deliver(usize),
}

struct Session {
    server: ServerState<char>,
    clients: Vec<ClientState<char>>,
    budgets: Vec<usize>,
    uplinks: Vec<VecDeque<OpEnvelope<char>>>,
    downlinks: Vec<VecDeque<Broadcast<char>>>,
    trace: Vec<String>,
}

impl Session {
    fn new(rng: &mut ChaCha8Rng, n: usize, ops: usize) -> Self {
        let initial = random_tree(rng);
        let trace = vec![format!("init {initial} clients={n}")];
        Session {
            server: ServerState::new(initial.clone()),
            clients: (0..n).map(|i| ClientState::new(SiteId(i as u64 + 1), initial.clone(), 0)).collect(),
            budgets: vec![ops; n],
            uplinks: vec![VecDeque::new(); n],
            downlinks: vec![VecDeque::new(); n],
            trace,
        }
    }

    fn events(&self) -> Vec<Event> {
        let mut out = Vec::new();
        for i in 0..self.clients.len() {
            if self.budgets[i] > 0 {
                out.push(Event::Edit(i));
            }
            if !self.uplinks[i].is_empty() {
                out.push(Event::Receive(i));
            }
            if !self.downlinks[i].is_empty() {
                out.push(Event::Deliver(i));
            }
        }
        out
    }

    fn run(&mut self, rng: &mut ChaCha8Rng) -> Result<(), String> {
        loop {
            let events = self.events();
            let Some(&event) = events.choose(rng) else {
                return Ok(());
            };
            self.step(rng, event).map_err(|e| {
                self.trace.push(format!("error: {e}"));
                e.to_string()
            })?;
        }
    }

    fn step(&mut self, rng: &mut ChaCha8Rng, event: Event) -> Result<(), SessionError> {
        match event {
            Event::Edit(i) => {
                self.budgets[i] -= 1;
                let op = random_op(rng, self.clients[i].doc());
                let env = self.clients[i].local_edit(op)?;
                self.trace.push(format!(
                    "edit {} seq={} parent={} {}",
                    env.site,
                    env.seq,
                    env.parent_revision,
                    serde_json::to_string(&env.op).expect("op encodes")
                ));
                self.uplinks[i].push_back(env);
                self.check_client(i)?;
            }
            Event::Receive(i) => {
                let env = self.uplinks[i].pop_front().expect("event implies a queued envelope");
                let b = self.server.ingest(&env)?;
                self.trace.push(format!(
                    "commit rev={} {} {} => {}",
                    b.rev,
                    b.site,
                    serde_json::to_string(&b.op).expect("op encodes"),
                    self.server.doc()
                ));
                for link in &mut self.downlinks {
                    link.push_back(b.clone());
                }
            }
            Event::Deliver(i) => {
                let b = self.downlinks[i].pop_front().expect("event implies a queued broadcast");
                self.clients[i].ingest_remote(&b)?;
                self.trace.push(format!("deliver rev={} to {} => {}", b.rev, self.clients[i].site, self.clients[i].doc()));
                self.check_client(i)?;
            }
        }
        Ok(())
    }

    /// A client's document is the server document at its synced revision
    /// with its pending operations applied.
    fn check_client(&self, i: usize) -> Result<(), SessionError> {
        let c = &self.clients[i];
        let base = self.server.doc_at(c.synced_revision()).ok_or(SessionError::Invariant(c.site))?;
        let expected = c
            .pending()
            .iter()
            .try_fold(base, |d, op| apply_tree(op, &d).ok())
            .ok_or(SessionError::Invariant(c.site))?;
        if expected != *c.doc() {
            return Err(SessionError::Invariant(c.site));
        }
        Ok(())
    }

    fn check_quiescent(&mut self) -> Result<(), String> {
        for c in &self.clients {
            if !c.pending().is_empty() || c.synced_revision() != self.server.head() || c.doc() != self.server.doc() {
                let msg = format!("{} ended with {} but server has {}", c.site, c.doc(), self.server.doc());
                self.trace.push(msg.clone());
                return Err(msg);
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
enum SessionError {
    #[error(transparent)]
    Sync(#[from] SyncError),
    #[error("{0} document does not match server state plus pending operations")]
    Invariant(SiteId),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(min: usize, max: usize, ops: usize, sessions: usize, seed: u64) -> SimConfig {
        SimConfig { min_clients: min, max_clients: max, max_ops: ops, sessions, seed }
    }

    #[test]
    fn rejects_single_client() {
        assert_eq!(simulate_sessions(&cfg(1, 1, 5, 1, 0)), Err(ConfigError::TooFewClients { min: 2, got: 1 }));
        assert_eq!(simulate_sessions(&cfg(3, 2, 5, 1, 0)), Err(ConfigError::EmptyClientRange(3, 2)));
    }

    #[test]
    fn no_ops_converges() {
        let r = simulate_sessions(&cfg(2, 4, 0, 20, 9)).unwrap();
        assert_eq!(r.converged, 20);
    }

    #[test]
    fn small_run_converges_and_is_deterministic() {
        let c = cfg(2, 4, 12, 60, 7);
        let a = simulate_sessions(&c).unwrap();
        assert!(a.passed(), "{:?}", a.divergences.first());
        let b = simulate_sessions(&c).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.digests.len(), 60);
        assert_eq!(a.digests[0].len(), 16);
    }

    #[test]
    fn different_seeds_differ() {
        let a = simulate_sessions(&cfg(2, 3, 8, 10, 1)).unwrap();
        let b = simulate_sessions(&cfg(2, 3, 8, 10, 2)).unwrap();
        assert_ne!(a.digests, b.digests);
    }

    #[test]
    fn random_ops_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t = random_tree(&mut rng);
            assert!(t.node_count() <= 5);
            let op = random_op(&mut rng, &t);
            assert!(crate::tree::is_valid(&op, &t));
        }
    }
}
