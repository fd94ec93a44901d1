from __future__ import annotations

import pytest

from dmcert.fp_linalg import InvalidPrimeError
from dmcert.stable_trees import (
    ROOT,
    DualTree,
    ResourceGuardError,
    StableTree,
    case_counts,
    compatible_automorphisms,
    count_by_vertices,
    enumerate_stable_trees,
    no_nodal_fixed_points,
    nodal_fixed_point_search,
    nodal_witness,
    nodal_witnesses,
)
from oracles import count_rooted_trees


@pytest.mark.parametrize("p, count", [(2, 1), (3, 4), (5, 236), pytest.param(7, 39208, marks=pytest.mark.slow)])
def test_tree_counts(p, count):
    trees = enumerate_stable_trees(p)
    assert len(trees) == count
    assert len(set(trees)) == count
    assert all(t.is_stable() for t in trees)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_counts_match_set_partition_oracle(p):
    assert len(enumerate_stable_trees(p)) == count_rooted_trees(tuple(range(1, p + 1)))


def test_p3_trees():
    trees = enumerate_stable_trees(3)
    assert trees[0] == StableTree(3)
    assert [t.splits for t in trees[1:]] == [((1, 2),), ((1, 3),), ((2, 3),)]
    assert count_by_vertices(trees) == {1: 1, 2: 3}


def test_tree_structure():
    t = StableTree(5, ((1, 2, 3), (1, 2)))
    assert t.splits == ((1, 2), (1, 2, 3))
    assert t.parent(0) == 1 and t.parent(1) == ROOT
    assert t.labels_at(ROOT) == (4, 5, 6)
    assert t.labels_at(1) == (3,)
    assert t.labels_at(0) == (1, 2)
    assert [t.valence(v) for v in (ROOT, 0, 1)] == [4, 3, 3]
    assert t.relabelled().splits == ((2, 3), (2, 3, 4))
    assert t.to_json() == [[1, 2], [1, 2, 3]]


def test_chain_of_nested_splits_is_stable():
    t = StableTree(5, ((1, 2), (1, 2, 3), (1, 2, 3, 4)))
    assert t.is_stable()
    assert t.vertex_count == 4
    assert [t.valence(v) for v in (ROOT, 0, 1, 2)] == [3, 3, 3, 3]


@pytest.mark.parametrize("p", [3, 5])
def test_no_nodal_fixed_points(p):
    assert no_nodal_fixed_points(p)
    assert nodal_fixed_point_search(p) == []


@pytest.mark.parametrize("p, cases", [
    (3, {"fixed_point_free": 3, "unequal_label_counts": 0, "stability": 0}),
    (5, {"fixed_point_free": 195, "unequal_label_counts": 40, "stability": 0}),
])
def test_every_nodal_tree_gets_a_witness(p, cases):
    witnesses = nodal_witnesses(p)
    assert len(witnesses) == len(enumerate_stable_trees(p)) - 1
    assert case_counts(witnesses) == cases
    assert all(w.automorphisms == 0 and w.contradiction for w in witnesses)


def test_witness_for_two_component_tree():
    w = nodal_witness(StableTree(5, ((1, 2), (3, 4, 5))))
    assert (w.b, w.c, w.automorphisms) == (2, 2, 0)
    assert w.case == "unequal_label_counts"
    w = nodal_witness(StableTree(5, ((1, 2),)))
    assert w.case == "fixed_point_free"
    assert "[3, 4, 5]" in w.detail


def test_fabricated_sigma_compatible_tree_is_found_and_refuted():
    # all of X on one vertex, x_4 alone on the other
    tree = DualTree(3, ((1, 2, 3),))
    assert tree.relabelled() == tree
    assert not tree.is_stable()
    survivors = nodal_fixed_point_search(3, [StableTree(3, ((1, 2),)), tree])
    assert [w.tree for w in survivors] == [tree]
    w = survivors[0]
    assert (w.b, w.c, w.automorphisms) == (3, 1, 1)
    assert w.case == "stability"
    assert w.detail == "p = 3·1, root has valence 2"
    assert w.contradiction


def test_fabricated_star_of_singletons_is_refuted_by_stability():
    tree = DualTree(5, tuple((i,) for i in range(1, 6)))
    w = nodal_witness(tree)
    assert (w.b, w.c, w.automorphisms) == (1, 5, 1)
    assert w.case == "stability"
    assert "valence 2" in w.detail
    assert w.contradiction and not w.stable
    assert no_nodal_fixed_points(5, [w])


def test_stable_trees_only_admit_the_identity():
    for t in enumerate_stable_trees(5):
        assert compatible_automorphisms(t, steps=0) == 1
        assert compatible_automorphisms(t, steps=5) == 1


def test_single_vertex_is_not_searched():
    assert nodal_fixed_point_search(5, [StableTree(5)]) == []
    with pytest.raises(ValueError, match="smooth locus"):
        nodal_witness(StableTree(5))


@pytest.mark.parametrize("splits", [((1,),), ((1, 2, 3),), ((1, 2), (2, 3)), ((1, 2), (1, 2)), ((0, 1),), ((1, 4),)])
def test_stable_tree_rejects_bad_splits(splits):
    with pytest.raises(ValueError):
        StableTree(3, splits)


def test_dual_tree_allows_unstable_sizes_but_not_crossings():
    assert DualTree(3, ((1,), (1, 2, 3))).vertex_count == 3
    with pytest.raises(ValueError, match="cross"):
        DualTree(5, ((1, 2), (2, 3)))
    with pytest.raises(ValueError, match="empty"):
        DualTree(3, ((),))


def test_relabelling_has_order_p():
    for t in enumerate_stable_trees(5):
        assert t.relabelled(5) == t
        if t.vertex_count > 1:
            assert t.relabelled() != t


def test_resource_guard(monkeypatch):
    with pytest.raises(ResourceGuardError):
        enumerate_stable_trees(11)
    with pytest.raises(ResourceGuardError):
        enumerate_stable_trees(5, max_p=3)
    monkeypatch.setenv("DMCERT_TREE_MAX_P", "3")
    with pytest.raises(ResourceGuardError):
        enumerate_stable_trees(5)
    with pytest.raises(InvalidPrimeError):
        enumerate_stable_trees(4)
