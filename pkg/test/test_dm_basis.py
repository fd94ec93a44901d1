from __future__ import annotations

import pytest

from dmcert.cyclic_cohomology import decompose_permutation_rep
from dmcert.dm_basis import (
    InternalInconsistencyError,
    MalformedMonomialError,
    MarkedSet,
    Monomial,
    degree_bound,
    degree_permutation,
    enumerate_basis,
    fixed_subring_relation,
    is_admissible,
    orbit_decomposition,
    poincare_symmetric,
    sigma,
    top_degree,
)
from dmcert.fp_linalg import InvalidPrimeError
from dmcert.keel import betti_oracle
from oracles import filtered_basis


def _key(m: Monomial):
    return tuple((s.members, d) for s, d in m.factors)


def test_admissibility_examples():
    assert is_admissible(Monomial.unit(3))
    assert is_admissible(Monomial.pi_x_power(3, 1))
    assert not is_admissible(Monomial.pi_x_power(3, 2))
    crossing = Monomial.from_exponents(5, {(1, 2, 3): 1, (2, 3, 4): 1})
    assert not is_admissible(crossing)


def test_nested_support_bound():
    # S = {1,2,3} inside X = {1..5}: d_X < 1 - 1 + 5 - 3 = 2.
    assert degree_bound(frozenset(range(1, 6)), [frozenset({1, 2, 3})]) == 2
    assert is_admissible(Monomial.from_exponents(5, {(1, 2, 3): 1, (1, 2, 3, 4, 5): 1}))
    assert not is_admissible(Monomial.from_exponents(5, {(1, 2, 3): 1, (1, 2, 3, 4, 5): 2}))


def test_small_sets_are_malformed():
    with pytest.raises(MalformedMonomialError):
        is_admissible(Monomial.from_exponents(5, {(1, 2): 1}))
    with pytest.raises(MalformedMonomialError):
        is_admissible(Monomial.from_exponents(3, {(1, 2, 4): 1}))
    with pytest.raises(MalformedMonomialError):
        Monomial.from_exponents(5, {(1, 2, 3): -1})


@pytest.mark.parametrize(
    "p, dims",
    [
        (2, {0: 1}),
        (3, {0: 1, 2: 1}),
        (5, {0: 1, 2: 16, 4: 16, 6: 1}),
    ],
)
def test_betti_numbers(p, dims):
    basis = enumerate_basis(p)
    assert basis.dims() == dims
    assert all(is_admissible(m) for m in basis.monomials())


def test_p3_basis_is_one_and_pi_x():
    basis = enumerate_basis(3)
    assert [str(m) for m in basis.monomials()] == ["1", "Π_{1,2,3}"]


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_dims_match_keel_for_any_label_count(n):
    expected = {d: c for d, c in betti_oracle(n).items() if c}
    assert enumerate_basis(n).dims() == expected


def test_non_prime_label_count():
    assert enumerate_basis(4).dims() == {0: 1, 2: 5, 4: 1}


@pytest.mark.parametrize("n", [3, 4, 5])
def test_enumeration_matches_generate_and_filter(n):
    basis = enumerate_basis(n)
    oracle = filtered_basis(n)
    ours = {deg: sorted(_key(m) for m in basis.piece(deg)) for deg in basis.degrees}
    assert ours == oracle


def test_max_degree_truncates():
    assert enumerate_basis(5, 2).dims() == {0: 1, 2: 16}
    assert enumerate_basis(5, 0).total == 1


def test_canonical_order_is_deterministic():
    first = [_key(m) for m in enumerate_basis(5).monomials()]
    second = [_key(m) for m in enumerate_basis(5).monomials()]
    assert first == second


def test_sigma_shifts_labels():
    m = Monomial.from_exponents(5, {(1, 2, 3): 1})
    assert sigma(m) == Monomial.from_exponents(5, {(2, 3, 4): 1})
    assert sigma(Monomial.from_exponents(5, {(3, 4, 5): 1})) == Monomial.from_exponents(5, {(1, 4, 5): 1})
    assert MarkedSet.of(5, 1, 3).members == (1, 3, 5)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_sigma_has_order_p_and_preserves_admissibility(p):
    for m in enumerate_basis(p).monomials():
        image = sigma(m)
        assert is_admissible(image)
        assert sigma(m, p) == m


@pytest.mark.parametrize("p, fixed, cycles", [(3, 2, 0), (5, 4, 6), (7, 6, 232)])
def test_orbit_decomposition(p, fixed, cycles):
    decomp = orbit_decomposition(enumerate_basis(p))
    assert len(decomp.fixed) == fixed == p - 1
    assert len(decomp.cycles) == cycles
    assert decomp.total == enumerate_basis(p).total
    for orbit in decomp.cycles:
        assert len(orbit) == p
        assert all(sigma(orbit[k]) == orbit[(k + 1) % p] for k in range(p))
    expected = {_key(Monomial.unit(p))} | {_key(Monomial.pi_x_power(p, k)) for k in range(1, p - 1)}
    assert {_key(m) for m in decomp.fixed} == expected


def test_p2_counts_identity_as_fixed():
    decomp = orbit_decomposition(enumerate_basis(2))
    assert decomp.fixed == (Monomial.unit(2),)
    assert decomp.cycles == ()


def test_orbit_decomposition_needs_prime():
    with pytest.raises(InvalidPrimeError):
        orbit_decomposition(enumerate_basis(4))


def test_missing_image_is_inconsistent():
    basis = enumerate_basis(5)
    piece = basis.piece(2)
    broken = type(basis)(5, {0: basis.piece(0), 2: piece[1:], 4: basis.piece(4), 6: basis.piece(6)})
    with pytest.raises(InternalInconsistencyError):
        orbit_decomposition(broken)


def test_degree_two_piece_at_p5():
    basis = enumerate_basis(5)
    assert decompose_permutation_rep(16, degree_permutation(basis, 2), p=5) == (1, 3)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_poincare_duality_and_top_degree(p):
    basis = enumerate_basis(p)
    assert poincare_symmetric(basis)
    assert max(basis.degrees) == top_degree(p)


def test_fixed_subring_relation():
    rel = fixed_subring_relation(5)
    assert rel["holds"]
    assert rel["admissible_powers"] == [1, 2, 3]
    assert rel["vanishing_power"] == 4
    assert fixed_subring_relation(2)["holds"]


def test_monomial_json():
    m = Monomial.from_exponents(5, {(1, 2, 3): 1, (1, 2, 3, 4, 5): 1})
    assert m.to_json() == [{"set": [1, 2, 3], "exp": 1}, {"set": [1, 2, 3, 4, 5], "exp": 1}]
    assert m.degree == 4
