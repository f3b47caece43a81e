import random
from fractions import Fraction

import pytest

from webmint.aggtree import TreeNode, build_aggregated_log
from webmint.postmine import PostMinerConfig, prune_and_merge

from conftest import number, random_view


def node(concept, occ, hits, ends=0, children=()):
    return TreeNode(concept, occ, hits, ends, 0, False, list(children))


@pytest.fixture
def merge_fixture():
    # R(10) with branches A(1)->T(1), B(1)->T(1) and C(8)
    r = node("R", 1, 10, 0, [
        node("A", 1, 1, 0, [node("T", 1, 1, 1)]),
        node("B", 1, 1, 0, [node("T", 1, 1, 1)]),
        node("C", 1, 8, 8),
    ])
    root = TreeNode(None, 0, 10, 0, 0, False, [r])
    return root


def test_merge_fixture_thr2(merge_fixture):
    out = prune_and_merge(merge_fixture, PostMinerConfig(2))
    r = out.children[0]
    assert (r.concept, r.hits) == ("R", 10)
    assert {(c.concept, c.occ, c.hits, c.merged) for c in r.children} == {
        ("C", 1, 8, False), ("T", 1, 2, True)}
    t = r.child("T", 1)
    assert t.ends == 2 and t.children == []


def test_threshold_one_is_identity(merge_fixture):
    out = prune_and_merge(merge_fixture, PostMinerConfig(1))
    assert out.equals(merge_fixture.copy().sort())


def test_root_survives_aggressive_threshold(merge_fixture):
    out = prune_and_merge(merge_fixture, PostMinerConfig(100))
    assert out.concept is None and out.hits == 10
    assert [c.concept for c in out.children] == ["R"]
    assert out.children[0].children == []


def test_fractional_threshold_scales_with_root(merge_fixture):
    # 0.15 of 10 root hits rounds up to 2: same outcome as thr=2
    out = prune_and_merge(merge_fixture, PostMinerConfig(0.15))
    assert {(c.concept, c.hits) for c in out.children[0].children} == {
        ("C", 8), ("T", 2)}


def test_threshold_validation():
    with pytest.raises(ValueError):
        PostMinerConfig(0).absolute(10)
    with pytest.raises(ValueError):
        PostMinerConfig(1.5).absolute(10)
    assert PostMinerConfig(Fraction(1, 4)).absolute(10) == 3


def test_input_tree_is_not_mutated(merge_fixture):
    before = merge_fixture.copy()
    prune_and_merge(merge_fixture, PostMinerConfig(2))
    assert merge_fixture.equals(before)


def test_deep_splice_reattaches_grandchildren():
    tree = TreeNode(None, 0, 5, 0, 0, False, [
        node("R", 1, 5, 0, [
            node("x", 1, 1, 0, [node("y", 1, 1, 1)]),
            node("y", 1, 4, 4),
        ]),
    ])
    out = prune_and_merge(tree, PostMinerConfig(2))
    r = out.children[0]
    # x is pruned; its y child merges into the surviving sibling y
    y = r.child("y", 1)
    assert y.hits == 5 and y.ends == 5 and y.merged


def check_invariants(before, after, thr_abs):
    # min-hits: every surviving non-root node meets the threshold
    roots = {id(after)}
    if after.concept is None and len(after.children) == 1:
        roots.add(id(after.children[0]))
    for n in after.walk():
        if id(n) not in roots:
            assert n.hits >= thr_abs
    # conservation: ends never exceed the original total, root hits kept
    assert after.hits == before.hits
    assert after.total_ends() <= before.total_ends()
    # dominance: parent hits >= sum of children hits
    for n in after.walk():
        assert n.hits >= sum(c.hits for c in n.children)


def test_random_trees_invariants_and_idempotence():
    rng = random.Random(2024)
    for _ in range(60):
        view = random_view(rng, max_sessions=60, alphabet=5, max_len=6)
        tree = build_aggregated_log(view)
        thr = rng.randint(1, 6)
        cfg = PostMinerConfig(thr)
        out = prune_and_merge(tree, cfg)
        check_invariants(tree, out, thr)
        again = prune_and_merge(out, cfg)
        assert again.equals(out)
