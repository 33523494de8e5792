use std::collections::HashSet;

use treeot_core::verify::{
    check_tp1_with, default_payloads, enumerate_trees, enumerate_valid_ops, exhaustive_list_tp1,
    exhaustive_list_tp1_via_trees, exhaustive_tp1, exhaustive_tp1_with, EnumConfig, Tp1Verdict,
};
use treeot_core::{insert_t, xform_t, AccessPath, SiteId, Tree, TreeOp};

fn small_cfg() -> EnumConfig<char> {
    EnumConfig { max_nodes: 4, max_branch: 3, max_depth: 3, value_alphabet: vec!['v'], payload_pool: default_payloads() }
}

fn full_cfg() -> EnumConfig<char> {
    EnumConfig { max_nodes: 6, max_branch: 3, max_depth: 3, value_alphabet: vec!['v'], payload_pool: default_payloads() }
}

/// Insert/insert with the position adjustment left out.
fn without_update_plus(o1: &TreeOp<char>, s1: SiteId, o2: &TreeOp<char>, s2: SiteId) -> (TreeOp<char>, TreeOp<char>) {
    match (o1, o2) {
        (TreeOp::InsertT { .. }, TreeOp::InsertT { .. }) => (o1.clone(), o2.clone()),
        _ => xform_t(o1, s1, o2, s2),
    }
}

#[test]
fn xform_is_symmetric() {
    let (s1, s2) = (SiteId(1), SiteId(2));
    for tree in enumerate_trees(&small_cfg()) {
        let ops = enumerate_valid_ops(&tree, &default_payloads());
        for a in &ops {
            for b in &ops {
                let (a1, b1) = xform_t(a, s1, b, s2);
                let (b2, a2) = xform_t(b, s2, a, s1);
                assert_eq!((&a1, &b1), (&a2, &b2), "{tree} {a:?} {b:?}");
            }
        }
    }
}

#[test]
fn broken_xform_is_caught_and_reproducible() {
    let report = exhaustive_tp1_with(&small_cfg(), &without_update_plus).unwrap();
    assert!(!report.violations.is_empty());
    for cx in &report.violations {
        assert!(!cx.replay(&without_update_plus).holds(), "{cx:?}");
        assert!(cx.replay(&xform_t).holds());
        assert!(matches!(
            check_tp1_with(&without_update_plus, &cx.o1, cx.s1, &cx.o2, cx.s2, &cx.context),
            Tp1Verdict::Diverged { .. } | Tp1Verdict::IllFormed { .. }
        ));
    }
    // Two inserts at the root's only slot need nothing more than a leaf.
    assert!(report.violations.iter().any(|cx| cx.context.node_count() == 1));
}

#[test]
fn exhaustive_report_is_deterministic() {
    let strip = |mut r: treeot_core::verify::Tp1Report<Tree<char>, TreeOp<char>>| {
        r.elapsed_ms = 0;
        serde_json::to_string(&r).unwrap()
    };
    let a = strip(exhaustive_tp1_with(&small_cfg(), &without_update_plus).unwrap());
    let b = strip(exhaustive_tp1_with(&small_cfg(), &without_update_plus).unwrap());
    assert_eq!(a, b);
}

/// Every bounded tree, found by closing a single leaf under leaf insertion.
fn trees_by_growth(cfg: &EnumConfig<char>) -> HashSet<String> {
    let within = |t: &Tree<char>| t.node_count() <= cfg.max_nodes && t.depth() <= cfg.max_depth && t.max_branching() <= cfg.max_branch;
    let mut seen = HashSet::new();
    let mut frontier = vec![Tree::leaf('v')];
    while let Some(t) = frontier.pop() {
        if !seen.insert(t.to_string()) {
            continue;
        }
        for node in t.node_paths() {
            let n = t.get(&node).unwrap().children.len();
            for slot in 0..=n {
                let grown = insert_t(Tree::leaf('v'), &node.child(slot), &t).unwrap();
                if within(&grown) && !seen.contains(&grown.to_string()) {
                    frontier.push(grown);
                }
            }
        }
    }
    seen
}

#[test]
fn tree_enumeration_and_case_count_oracle() {
    let cfg = full_cfg();
    let trees = enumerate_trees(&cfg);
    let listed: HashSet<String> = trees.iter().map(|t| t.to_string()).collect();
    assert_eq!(listed.len(), trees.len(), "duplicates");
    assert_eq!(listed, trees_by_growth(&cfg));

    // N nodes have 2N-1 insert slots and N-1 deletable nodes; each
    // unordered pair with repetition yields four cases.
    let payloads = cfg.payload_pool.len() as u64;
    let expected: u64 = trees
        .iter()
        .map(|t| {
            let n = t.node_count() as u64;
            let ops = payloads * (2 * n - 1) + (n - 1);
            2 * ops * (ops + 1)
        })
        .sum();
    assert_eq!(exhaustive_tp1(&cfg).unwrap().cases_total, expected);
}

#[test]
fn list_transform_matches_tree_transform_on_flat_trees() {
    let alphabet = ['a', 'b'];
    let lists = exhaustive_list_tp1(4, &alphabet);
    let trees = exhaustive_list_tp1_via_trees(4, &alphabet, 'R');
    assert!(lists.passed() && trees.passed());
    assert_eq!(lists.cases_total, trees.cases_total);
}

#[test]
fn access_path_encoding() {
    let p: AccessPath = serde_json::from_str("[0,2,1]").unwrap();
    assert_eq!(p, AccessPath::from([0, 2, 1]));
    assert_eq!(p.to_string(), "[0,2,1]");
}
