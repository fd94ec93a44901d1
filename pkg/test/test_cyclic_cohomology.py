from __future__ import annotations

import numpy as np
import pytest

from dmcert import cyclic_cohomology
from dmcert.cyclic_cohomology import (
    InvalidRepresentationError,
    PeriodicResolutionDifferential,
    PermRepresentation,
    certify_regular_vanishing,
    decompose_permutation_rep,
    default_max_i,
    group_cohomology_dims,
    parse_cycle_notation,
    permutation_rep_dims,
    regular_coboundary_witness,
)
from dmcert.fp_linalg import FpMatrix, FpVector, cyclic_shift, norm_matrix
from oracles import brute_group_cohomology


def _elementary(n: int, i: int, j: int, c: int, p: int) -> FpMatrix:
    arr = np.eye(n, dtype=np.int64)
    arr[i, j] = c
    return FpMatrix(p, arr)


def _random_perm_rep(rng, p: int) -> PermRepresentation:
    """Fixed points plus free orbits, written in a random basis."""
    rep = PermRepresentation.trivial(p, rng.randint(1, 2))
    for _ in range(rng.randint(0, 2)):
        rep = rep.direct_sum(PermRepresentation.regular(p) if rng.random() < 0.7 else PermRepresentation.trivial(p))
    n, action = rep.dimension, rep.action
    if n == 1:
        return rep
    # conjugate by shears I + c e_ij, whose inverse is I - c e_ij
    for _ in range(4):
        i, j = rng.sample(range(n), 2)
        c = rng.randrange(1, p)
        action = _elementary(n, i, j, -c, p) @ action @ _elementary(n, i, j, c, p)
    return PermRepresentation(p, action)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_trivial_and_regular(p):
    max_i = default_max_i(p)
    assert group_cohomology_dims(PermRepresentation.trivial(p)) == [1] * (max_i + 1)
    assert group_cohomology_dims(PermRepresentation.regular(p)) == [1] + [0] * max_i


def test_trivial_plus_regular_at_p3():
    rep = PermRepresentation.trivial(3).direct_sum(PermRepresentation.regular(3))
    assert group_cohomology_dims(rep, 6) == [2, 1, 1, 1, 1, 1, 1]


def test_non_order_p_action_is_rejected():
    with pytest.raises(InvalidRepresentationError):
        PermRepresentation.from_permutation(3, [1, 0])
    with pytest.raises(InvalidRepresentationError):
        PermRepresentation(5, cyclic_shift(5, 3))


def test_non_permutation_action():
    # A Jordan block has order p over F_p.
    jordan = FpMatrix.from_rows([[1, 1], [0, 1]], 3)
    rep = PermRepresentation(3, jordan)
    assert group_cohomology_dims(rep, 4) == brute_group_cohomology(jordan.to_lists(), 3, 4)


@pytest.mark.parametrize("p", [2, 3])
def test_matches_cocycle_enumeration(rng, p):
    for _ in range(15):
        rep = _random_perm_rep(rng, p)
        if rep.dimension > 3:
            continue
        assert group_cohomology_dims(rep, 2) == brute_group_cohomology(rep.action.to_lists(), p, 2)


@pytest.mark.parametrize("p", [3, 5])
def test_additivity_on_random_sums(rng, p):
    for _ in range(50):
        a, b = _random_perm_rep(rng, p), _random_perm_rep(rng, p)
        total = group_cohomology_dims(a.direct_sum(b), 6)
        assert total == [x + y for x, y in zip(group_cohomology_dims(a, 6), group_cohomology_dims(b, 6))]


@pytest.mark.parametrize("p", [3, 5])
def test_two_periodic_from_degree_one(rng, p):
    for _ in range(10):
        dims = group_cohomology_dims(_random_perm_rep(rng, p), 9)
        assert dims[1:] == [dims[1], dims[2]] * 4 + [dims[1]]


def test_permutation_bridge():
    assert permutation_rep_dims(5, 1, 3, 4) == [4, 1, 1, 1, 1]
    rep = PermRepresentation.from_permutation(5, parse_cycle_notation("(1 2 3 4 5)(6)"))
    assert group_cohomology_dims(rep, 4) == permutation_rep_dims(5, 1, 1, 4)


def test_decompose_examples():
    assert decompose_permutation_rep(4, [0, 1, 2, 3], p=5) == (4, 0)
    assert decompose_permutation_rep(5, [1, 2, 3, 4, 0], p=5) == (0, 1)
    with pytest.raises(InvalidRepresentationError):
        decompose_permutation_rep(5, [1, 0, 2, 3, 4], p=5)
    with pytest.raises(InvalidRepresentationError):
        decompose_permutation_rep(3, [0, 0, 1], p=3)


def test_resolution_differentials_alternate():
    diff = PeriodicResolutionDifferential.for_representation(PermRepresentation.regular(3))
    assert diff.leaving(0) == cyclic_shift(3, 3) - FpMatrix.identity(3, 3)
    assert diff.leaving(1) == norm_matrix(cyclic_shift(3, 3), 3)
    assert diff.leaving(4) == diff.leaving(0)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_regular_coboundary_witness(p):
    sigma = cyclic_shift(p, p)
    minus = sigma - FpMatrix.identity(p, p)
    norm = norm_matrix(sigma, p)
    odd = [1, 2] + [0] * (p - 3) + [p - 3]
    assert (minus @ regular_coboundary_witness(p, 3, odd)) == FpVector(p, odd)
    assert (norm @ regular_coboundary_witness(p, 2, [4] * p)) == FpVector(p, [4] * p)
    with pytest.raises(ValueError):
        regular_coboundary_witness(p, 1, [1] + [0] * (p - 1))
    with pytest.raises(ValueError):
        regular_coboundary_witness(p, 2, [1] + [0] * (p - 1))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_regular_vanishing_is_certified_by_witnesses(p):
    assert certify_regular_vanishing(p) == ((p + 1) * p, [])
    assert certify_regular_vanishing(3, 4) == (6, [])
    assert certify_regular_vanishing(3, 0) == (0, [])


def test_wrong_witness_is_caught(monkeypatch):
    monkeypatch.setattr(cyclic_cohomology, "regular_coboundary_witness", lambda p, i, c: FpVector(p, [0] * p))
    checked, failed = certify_regular_vanishing(3, 4)
    assert failed == [1, 2, 3, 4]
    assert checked == 4


def test_cycle_notation():
    assert parse_cycle_notation("(1 2 3)") == [1, 2, 0]
    assert parse_cycle_notation("(1,3)(2)", size=4) == [2, 1, 0, 3]
    with pytest.raises(ValueError):
        parse_cycle_notation("1 2 3")
    with pytest.raises(ValueError):
        parse_cycle_notation("(1 2)(2 3)")
