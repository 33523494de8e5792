use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::list::ListDoc;
use crate::list_transform::{apply_list, xform_l, ListOp};
use crate::site::SiteId;
use crate::tree::{is_valid, Tree};
use crate::tree_transform::{apply_tree, xform_t, TreeOp};

use super::enumerate::{enumerate_list_ops, enumerate_lists, enumerate_trees, enumerate_valid_ops, EnumConfig};
use super::list_adapter;
use super::shrink::shrink_counterexample;
use super::ConfigError;

/// Outcome of checking one transformed pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tp1Verdict<D> {
    Converged,
    Diverged { left: D, right: D },
    /// A transformed operation could not be applied.
    IllFormed { reason: String },
}

impl<D> Tp1Verdict<D> {
    pub fn holds(&self) -> bool {
        matches!(self, Tp1Verdict::Converged)
    }
}

/// One violating case, replayable from its fields alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample<D, O> {
    pub context: D,
    pub o1: O,
    pub s1: SiteId,
    pub o2: O,
    pub s2: SiteId,
    /// `o2' . o1 (context)`
    pub left: Option<D>,
    /// `o1' . o2 (context)`
    pub right: Option<D>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tp1Report<D, O> {
    pub cases_total: u64,
    pub violations: Vec<Counterexample<D, O>>,
    pub elapsed_ms: u64,
}

impl<D, O> Tp1Report<D, O> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn verdict<D, O, E, A, X>(apply: &A, xform: &X, o1: &O, s1: SiteId, o2: &O, s2: SiteId, ctx: &D) -> Tp1Verdict<D>
where
    D: PartialEq,
    E: std::fmt::Display,
    A: Fn(&O, &D) -> Result<D, E>,
    X: Fn(&O, SiteId, &O, SiteId) -> (O, O),
{
    let (o1t, o2t) = xform(o1, s1, o2, s2);
    let run = |first: &O, second: &O, label: &str| -> Result<D, String> {
        let mid = apply(first, ctx).map_err(|e| format!("{label}: original op failed: {e}"))?;
        apply(second, &mid).map_err(|e| format!("{label}: transformed op failed: {e}"))
    };
    match (run(o1, &o2t, "left"), run(o2, &o1t, "right")) {
        (Ok(left), Ok(right)) if left == right => Tp1Verdict::Converged,
        (Ok(left), Ok(right)) => Tp1Verdict::Diverged { left, right },
        (Err(reason), _) | (_, Err(reason)) => Tp1Verdict::IllFormed { reason },
    }
}

/// Transforms `(o1, o2)` with `xform` and compares both composition orders
/// from `tree`.
pub fn check_tp1_with<V, X>(xform: &X, o1: &TreeOp<V>, s1: SiteId, o2: &TreeOp<V>, s2: SiteId, tree: &Tree<V>) -> Tp1Verdict<Tree<V>>
where
    V: Clone + PartialEq,
    X: Fn(&TreeOp<V>, SiteId, &TreeOp<V>, SiteId) -> (TreeOp<V>, TreeOp<V>),
{
    verdict(&apply_tree, xform, o1, s1, o2, s2, tree)
}

pub fn check_tp1<V: Clone + PartialEq>(o1: &TreeOp<V>, s1: SiteId, o2: &TreeOp<V>, s2: SiteId, tree: &Tree<V>) -> bool {
    check_tp1_with(&xform_t, o1, s1, o2, s2, tree).holds()
}

impl<V: Clone + PartialEq> Counterexample<Tree<V>, TreeOp<V>> {
    /// Re-runs the case against `xform`.
    pub fn replay<X>(&self, xform: &X) -> Tp1Verdict<Tree<V>>
    where
        X: Fn(&TreeOp<V>, SiteId, &TreeOp<V>, SiteId) -> (TreeOp<V>, TreeOp<V>),
    {
        check_tp1_with(xform, &self.o1, self.s1, &self.o2, self.s2, &self.context)
    }
}

pub(crate) fn counterexample<D: Clone, O: Clone>(
    ctx: &D,
    o1: &O,
    s1: SiteId,
    o2: &O,
    s2: SiteId,
    verdict: Tp1Verdict<D>,
) -> Counterexample<D, O> {
    let (left, right, error) = match verdict {
        Tp1Verdict::Converged => (None, None, None),
        Tp1Verdict::Diverged { left, right } => (Some(left), Some(right), None),
        Tp1Verdict::IllFormed { reason } => (None, None, Some(reason)),
    };
    Counterexample { context: ctx.clone(), o1: o1.clone(), s1, o2: o2.clone(), s2, left, right, error }
}

const SITE_ASSIGNMENTS: [(SiteId, SiteId); 2] = [(SiteId(1), SiteId(2)), (SiteId(2), SiteId(1))];

/// Checks every unordered pair (with repetition) of `ops` on `ctx`, in both
/// argument orders and under both site assignments: four cases per pair.
fn sweep_context<D, O, E, A, X>(ctx: &D, ops: &[O], apply: &A, xform: &X) -> (u64, Vec<Counterexample<D, O>>)
where
    D: Clone + PartialEq,
    O: Clone,
    E: std::fmt::Display,
    A: Fn(&O, &D) -> Result<D, E>,
    X: Fn(&O, SiteId, &O, SiteId) -> (O, O),
{
    let mut cases = 0;
    let mut violations = Vec::new();
    for i in 0..ops.len() {
        for j in i..ops.len() {
            for (a, b) in [(&ops[i], &ops[j]), (&ops[j], &ops[i])] {
                for (s1, s2) in SITE_ASSIGNMENTS {
                    cases += 1;
                    let v = verdict(apply, xform, a, s1, b, s2, ctx);
                    if !v.holds() {
                        violations.push(counterexample(ctx, a, s1, b, s2, v));
                    }
                }
            }
        }
    }
    (cases, violations)
}

fn sweep_all<D, O, E, A, X>(contexts: Vec<(D, Vec<O>)>, apply: &A, xform: &X) -> (u64, Vec<Counterexample<D, O>>)
where
    D: Clone + PartialEq + Send + Sync,
    O: Clone + Send + Sync,
    E: std::fmt::Display,
    A: Fn(&O, &D) -> Result<D, E> + Sync,
    X: Fn(&O, SiteId, &O, SiteId) -> (O, O) + Sync,
{
    let per_context: Vec<_> = contexts
        .par_iter()
        .map(|(ctx, ops)| sweep_context(ctx, ops, apply, xform))
        .collect();
    let mut total = 0;
    let mut violations = Vec::new();
    for (cases, v) in per_context {
        total += cases;
        violations.extend(v);
    }
    (total, violations)
}

pub fn exhaustive_tp1<V>(cfg: &EnumConfig<V>) -> Result<Tp1Report<Tree<V>, TreeOp<V>>, ConfigError>
where
    V: Clone + PartialEq + Send + Sync,
{
    exhaustive_tp1_with(cfg, &xform_t)
}

/// Exhaustive TP1 sweep over the trees of `cfg` using `xform`. Violations
/// are shrunk before being reported.
pub fn exhaustive_tp1_with<V, X>(cfg: &EnumConfig<V>, xform: &X) -> Result<Tp1Report<Tree<V>, TreeOp<V>>, ConfigError>
where
    V: Clone + PartialEq + Send + Sync,
    X: Fn(&TreeOp<V>, SiteId, &TreeOp<V>, SiteId) -> (TreeOp<V>, TreeOp<V>) + Sync,
{
    cfg.validate()?;
    let start = Instant::now();
    let contexts: Vec<_> = enumerate_trees(cfg)
        .into_iter()
        .map(|t| {
            let ops = enumerate_valid_ops(&t, &cfg.payload_pool);
            (t, ops)
        })
        .collect();
    let (cases_total, raw) = sweep_all(contexts, &apply_tree, xform);
    let violations = raw.into_par_iter().map(|cx| shrink_counterexample(cx, xform)).collect();
    Ok(Tp1Report { cases_total, violations, elapsed_ms: start.elapsed().as_millis() as u64 })
}

/// Exhaustive TP1 sweep of the list transformation over every list of up to
/// `max_len` symbols from `alphabet`.
pub fn exhaustive_list_tp1<T>(max_len: usize, alphabet: &[T]) -> Tp1Report<ListDoc<T>, ListOp<T>>
where
    T: Clone + PartialEq + Send + Sync,
{
    let start = Instant::now();
    let contexts: Vec<_> = enumerate_lists(max_len, alphabet)
        .into_iter()
        .map(|l| {
            let ops = enumerate_list_ops(&l, alphabet);
            (l, ops)
        })
        .collect();
    let (cases_total, violations) = sweep_all(contexts, &apply_list, &xform_l);
    Tp1Report { cases_total, violations, elapsed_ms: start.elapsed().as_millis() as u64 }
}

/// The same list sweep, but with every list embedded as the children of a
/// root node and every list operation mapped to a depth-one tree
/// operation, so the tree transformation handles them.
pub fn exhaustive_list_tp1_via_trees<T>(max_len: usize, alphabet: &[T], root: T) -> Tp1Report<Tree<T>, TreeOp<T>>
where
    T: Clone + PartialEq + Send + Sync,
{
    let start = Instant::now();
    let contexts: Vec<_> = enumerate_lists(max_len, alphabet)
        .into_iter()
        .map(|l| {
            let ops = enumerate_list_ops(&l, alphabet).iter().map(list_adapter::to_tree_op).collect();
            (list_adapter::to_tree(root.clone(), &l), ops)
        })
        .collect();
    let (cases_total, violations) = sweep_all(contexts, &apply_tree, &xform_t);
    Tp1Report { cases_total, violations, elapsed_ms: start.elapsed().as_millis() as u64 }
}

/// Validity of both transformed operations on the other side's result.
/// Used by the property suites; a `NoOp` is always valid.
pub(crate) fn transformed_valid<V: Clone + PartialEq>(
    o1: &TreeOp<V>,
    s1: SiteId,
    o2: &TreeOp<V>,
    s2: SiteId,
    tree: &Tree<V>,
) -> bool {
    let (o1t, o2t) = xform_t(o1, s1, o2, s2);
    let after1 = apply_tree(o1, tree);
    let after2 = apply_tree(o2, tree);
    matches!((after1, after2), (Ok(a1), Ok(a2)) if is_valid(&o2t, &a1) && is_valid(&o1t, &a2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::t;
    use crate::verify::default_payloads;

    const S1: SiteId = SiteId(1);
    const S2: SiteId = SiteId(2);

    #[test]
    fn insert_against_delete_same_slot() {
        let tree = t("A(B)");
        let o1 = TreeOp::insert(t("X"), [0]);
        let o2 = TreeOp::delete([0]);
        assert!(check_tp1(&o1, S1, &o2, S2, &tree));
        // direct replay oracle: both orders yield A(X)
        let (o1t, o2t) = xform_t(&o1, S1, &o2, S2);
        let left = apply_tree(&o2t, &apply_tree(&o1, &tree).unwrap()).unwrap();
        let right = apply_tree(&o1t, &apply_tree(&o2, &tree).unwrap()).unwrap();
        assert_eq!(left, t("A(X)"));
        assert_eq!(right, t("A(X)"));
    }

    #[test]
    fn identical_deletes_become_noops() {
        let tree = t("A(B)");
        let d = TreeOp::delete([0]);
        assert!(check_tp1(&d, S1, &d, S2, &tree));
        assert_eq!(xform_t(&d, S1, &d, S2), (TreeOp::NoOp, TreeOp::NoOp));
    }

    #[test]
    fn effect_independent_pair() {
        let tree = t("A(B,C)");
        assert!(check_tp1(&TreeOp::insert(t("x"), [0, 0]), S1, &TreeOp::insert(t("y"), [1, 0]), S2, &tree));
    }

    #[test]
    fn single_leaf_case_count() {
        let cfg = EnumConfig::with_nodes(1, vec!['v'], vec![t("p")]);
        let report = exhaustive_tp1(&cfg).unwrap();
        assert_eq!(report.cases_total, 4);
        assert!(report.passed());
    }

    #[test]
    fn case_count_formula() {
        // A(B) with one payload has 4 ops: 4 * (4 * 5 / 2) cases.
        let (cases, v) = sweep_context(&t("A(B)"), &enumerate_valid_ops(&t("A(B)"), &[t("p")]), &apply_tree, &xform_t);
        assert_eq!(cases, 40);
        assert!(v.is_empty());
    }

    #[test]
    fn zero_bound_rejected() {
        let cfg = EnumConfig::with_nodes(0, vec!['v'], default_payloads());
        assert!(exhaustive_tp1(&cfg).is_err());
    }

    #[test]
    fn list_sweep_small() {
        let report = exhaustive_list_tp1(2, &['a', 'b']);
        assert!(report.passed());
        assert!(report.cases_total > 0);
    }

    #[test]
    fn report_encoding() {
        let report: Tp1Report<Tree<char>, TreeOp<char>> = Tp1Report { cases_total: 3, violations: vec![], elapsed_ms: 7 };
        assert_eq!(serde_json::to_string(&report).unwrap(), r#"{"cases_total":3,"violations":[],"elapsed_ms":7}"#);
    }
}
