use rayon::prelude::*;
use serde::Serialize;

use crate::site::SiteId;
use crate::tree::{decompose_delete, decompose_insert, delete_t, insert_t, subtree, AccessPath, Tree};
use crate::tree_transform::{apply_tree, effect_independent, TreeOp};

use super::enumerate::{enumerate_trees, enumerate_valid_ops, EnumConfig};
use super::tp1::transformed_valid;
use super::ConfigError;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub cases: u64,
    /// Human-readable description of each failing case.
    pub mismatches: Vec<String>,
}

impl LemmaCheck {
    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.mismatches.push(describe());
        }
    }

    fn merge(&mut self, other: LemmaCheck) {
        self.cases += other.cases;
        self.mismatches.extend(other.mismatches);
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Results of the structural property sweeps over every enumerated tree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    /// Split-path insertion equals direct insertion.
    pub decompose_insert: LemmaCheck,
    /// Split-path deletion equals direct deletion.
    pub decompose_delete: LemmaCheck,
    /// Deleting at the insertion path restores the tree.
    pub delete_after_insert: LemmaCheck,
    /// The subtree at the insertion path is the inserted tree.
    pub subtree_after_insert: LemmaCheck,
    /// Effect-independent pairs commute untransformed.
    pub effect_independence: LemmaCheck,
    /// Transformed operations stay valid on the other side's result.
    pub validity_preservation: LemmaCheck,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        [
            &self.decompose_insert,
            &self.decompose_delete,
            &self.delete_after_insert,
            &self.subtree_after_insert,
            &self.effect_independence,
            &self.validity_preservation,
        ]
        .iter()
        .all(|c| c.passed())
    }

    fn merge(&mut self, other: LemmaReport) {
        self.decompose_insert.merge(other.decompose_insert);
        self.decompose_delete.merge(other.decompose_delete);
        self.delete_after_insert.merge(other.delete_after_insert);
        self.subtree_after_insert.merge(other.subtree_after_insert);
        self.effect_independence.merge(other.effect_independence);
        self.validity_preservation.merge(other.validity_preservation);
    }
}

pub fn check_lemmas<V>(cfg: &EnumConfig<V>) -> Result<LemmaReport, ConfigError>
where
    V: Clone + PartialEq + std::fmt::Debug + Send + Sync,
{
    cfg.validate()?;
    let per_tree: Vec<LemmaReport> = enumerate_trees(cfg).par_iter().map(|t| lemmas_for(t, &cfg.payload_pool)).collect();
    let mut report = LemmaReport::default();
    for r in per_tree {
        report.merge(r);
    }
    Ok(report)
}

fn lemmas_for<V>(tree: &Tree<V>, payloads: &[Tree<V>]) -> LemmaReport
where
    V: Clone + PartialEq + std::fmt::Debug,
{
    let mut r = LemmaReport::default();
    let ops = enumerate_valid_ops(tree, payloads);
    for op in &ops {
        match op {
            TreeOp::InsertT { path, tree: t } => {
                let direct = insert_t(t.clone(), path, tree);
                for i in 1..path.len() {
                    let split = decompose_insert(t.clone(), path, tree, i);
                    r.decompose_insert.record(split.is_ok() && split == direct, || {
                        format!("insert {t:?} at {path} into {tree:?}, split {i}")
                    });
                }
                let restored = direct.as_ref().ok().map(|d| delete_t(path, d));
                r.delete_after_insert
                    .record(matches!(&restored, Some(Ok(back)) if back == tree), || format!("{path} on {tree:?}"));
                let found = direct.as_ref().ok().map(|d| subtree(d, path).cloned());
                r.subtree_after_insert
                    .record(matches!(&found, Some(Ok(s)) if s == t), || format!("{path} on {tree:?}"));
            }
            TreeOp::DeleteT { path } => {
                let direct = delete_t(path, tree);
                for i in 1..path.len() {
                    let split = decompose_delete(path, tree, i);
                    r.decompose_delete.record(split.is_ok() && split == direct, || {
                        format!("delete {path} from {tree:?}, split {i}")
                    });
                }
            }
            TreeOp::NoOp => {}
        }
    }
    let path_of = |op: &TreeOp<V>| op.path().cloned().unwrap_or_else(AccessPath::root);
    for o1 in &ops {
        for o2 in &ops {
            if effect_independent(&path_of(o1), &path_of(o2)) == Ok(true) {
                let a = apply_tree(o1, tree).and_then(|x| apply_tree(o2, &x));
                let b = apply_tree(o2, tree).and_then(|x| apply_tree(o1, &x));
                r.effect_independence
                    .record(a.is_ok() && a == b, || format!("{o1:?} / {o2:?} on {tree:?}"));
            }
            for (s1, s2) in [(SiteId(1), SiteId(2)), (SiteId(2), SiteId(1))] {
                r.validity_preservation
                    .record(transformed_valid(o1, s1, o2, s2, tree), || format!("{o1:?}@{s1} / {o2:?}@{s2} on {tree:?}"));
            }
        }
    }
    r
}
