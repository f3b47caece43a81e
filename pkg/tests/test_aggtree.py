import random

import pytest

from webmint.aggtree import (TreeFormatError, TreeNode, build_aggregated_log,
                             deserialize, prefix_hits, serialize, to_dot)
from webmint.sessions import LogView

from conftest import S1, S2, S3, number, random_view, seq


@pytest.fixture
def tree(three_sessions_view):
    return three_sessions_view.tree()


def test_super_root_counts_sessions(tree):
    assert tree.concept is None
    assert tree.hits == 3


def test_common_prefix_is_merged(tree):
    assert len(tree.children) == 1
    root = tree.children[0]
    assert (root.concept, root.occ, root.hits) == ("ParamA", 1, 3)
    branches = {(c.concept, c.occ): c.hits for c in root.children}
    assert branches == {("ShortList", 1): 1, ("LongList", 1): 2}


def test_ends_mark_session_terminations(tree):
    assert tree.total_ends() == 3
    # session 3 ends at (LongList,2) under ButtonX
    node = tree.children[0]
    for key in [("LongList", 1), ("ButtonX", 1), ("LongList", 2)]:
        node = node.child(*key)
    assert node.ends == 1 and node.hits == 1


def test_hits_of_node_equals_sessions_through_it():
    view = LogView([number(["a", "b"]), number(["a", "b", "c"]),
                    number(["a", "c"])])
    tree = view.tree()
    a = tree.child("a", 1)
    assert a.hits == 3
    assert a.child("b", 1).hits == 2


def test_multiplicity_counts():
    view = LogView([number(["a", "b"])] * 5)
    tree = view.tree()
    assert tree.hits == 5 and tree.child("a", 1).hits == 5


def test_children_sorted_by_hits_then_name(tree):
    root = tree.children[0]
    hits = [c.hits for c in root.children]
    assert hits == sorted(hits, reverse=True)


def test_prefix_hits(tree):
    assert prefix_hits(tree, seq(("ParamA", 1))) == 3
    assert prefix_hits(tree, seq(("ParamA", 1), ("LongList", 1))) == 2
    assert prefix_hits(tree, seq(("Nope", 1))) == 0


def test_hits_invariant_everywhere(tree):
    for node in tree.walk():
        assert node.hits >= sum(c.hits for c in node.children)
        assert node.hits == sum(c.hits for c in node.children) + node.ends


def test_roundtrip_serialization(tree):
    text = serialize(tree)
    again = deserialize(text)
    assert again.equals(tree)
    assert serialize(again) == text


def test_deserialize_rejects_tampered_counts(tree):
    text = serialize(tree).replace('"hits":3', '"hits":1', 1)
    with pytest.raises(TreeFormatError):
        deserialize(text)


def test_deserialize_rejects_garbage():
    with pytest.raises(TreeFormatError):
        deserialize("{not json")
    with pytest.raises(TreeFormatError):
        deserialize('{"concept": "a"}')


def test_dot_output(tree):
    dot = to_dot(tree, title="t")
    assert dot.startswith('digraph "t"')
    assert "ParamA,1 (3)" in dot
    tree.children[0].merged = True
    assert "style=dashed" in to_dot(tree)


def test_insert_marks_completed():
    t = TreeNode(None, 0)
    t.insert(number(["a", "b"]), 2, completed=True)
    t.insert(number(["a"]), 1)
    assert t.child("a", 1).child("b", 1).completed == 2
    assert t.total_completed() == 2


def test_random_trees_preserve_fragment_multiset():
    rng = random.Random(42)
    for _ in range(25):
        view = random_view(rng, max_sessions=40, alphabet=5, max_len=6)
        tree = build_aggregated_log(view)
        assert tree.hits == view.card()
        assert tree.total_ends() == view.card()
        # every sequence is a root path with positive hits all the way down
        for s, mult in view.seqs.items():
            node = tree
            for page in s:
                node = node.child(page.concept, page.occ)
                assert node is not None and node.hits >= mult
            assert node.ends >= mult
