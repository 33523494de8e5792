"""Smoke test for the treeot Python module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`
or `pip install --no-build-isolation ./crates/py`, then run this file.
"""

import treeot


def scalar(v):
    return {"v": {"t": "scalar", "v": v}, "c": []}


def main():
    # List transformation: an insert after a concurrently deleted item moves left.
    a, b = treeot.xform_l({"kind": "insert_l", "item": "x", "pos": 2}, 1, {"kind": "delete_l", "pos": 0}, 2)
    assert a == {"kind": "insert_l", "item": "x", "pos": 1}, a
    assert b == {"kind": "delete_l", "pos": 0}, b

    # Tree transformation on access paths.
    leaf = {"v": "p", "c": []}
    o1, o2 = treeot.xform_t(
        {"kind": "insert_t", "path": [0], "tree": leaf}, 1, {"kind": "delete_t", "path": [1]}, 2
    )
    assert o2 == {"kind": "delete_t", "path": [2]}, o2
    assert treeot.transformation_point([0, 1, 2], [0, 3]) == 1
    assert treeot.effect_independent([1, 0], [0, 0])

    tree = {"v": "R", "c": [{"v": "X", "c": []}]}
    assert treeot.apply({"kind": "delete_t", "path": [0]}, tree) == {"v": "R", "c": []}

    # JSON documents as trees.
    doc = {"text": ["X", "Y", "Z"], "meta": {"n": 1}}
    t = treeot.json_to_tree(doc)
    assert treeot.tree_to_json(t) == doc

    # The XYZ session through a server and two clients.
    server = treeot.Server(treeot.json_to_tree({"text": ["X", "Y", "Z"]}))
    c1 = treeot.Client(1, server.doc, 0)
    c2 = treeot.Client(2, server.doc, 0)
    e1 = c1.local_edit({"kind": "insert_t", "path": [0, 0, 0, 0], "tree": scalar("A")})
    e2 = c2.local_edit({"kind": "delete_t", "path": [0, 0, 0, 1]})
    for b in [server.ingest(e1), server.ingest(e2)]:
        c1.ingest_remote(b)
        c2.ingest_remote(b)
    assert c1.doc == c2.doc == server.doc
    assert treeot.tree_to_json(server.doc) == {"text": ["A", "X", "Z"]}

    try:
        server.ingest(e1)
    except treeot.OtError as e:
        assert "stale-seq" in str(e)
    else:
        raise AssertionError("duplicate envelope accepted")

    ops = treeot.edit_to_op(server.doc, {"kind": "set_key", "path": [0], "key": "b", "value": True})
    assert ops[0]["path"] == [0, 0], ops

    report = treeot.verify("lists", max_len=3)
    assert report["violations"] == [] and report["cases_total"] > 0
    report = treeot.verify("trees", max_nodes=4)
    assert report["violations"] == []
    sim = treeot.simulate(clients=(2, 4), ops=10, sessions=50, seed=42)
    assert sim["converged"] == 50, sim
    assert sim == treeot.simulate(clients=(2, 4), ops=10, sessions=50, seed=42)

    print("treeot smoke test passed")


if __name__ == "__main__":
    main()
