"""Monomial basis of H*(M̄_{0,1+p}) in the symmetric generators Π_S.

The marked points are x_1..x_{p+1}; X = {1..p} and x_{p+1} never appears in a
support.  A basis monomial is ∏ Π_S^{d_S} over a laminar support of subsets
|S| >= 3 with, for each S whose maximal proper support-subsets are
S_1..S_k,

    d_S < k - 1 + |S| - sum |S_i|.

deg Π_S = 2.  The cyclic relabelling σ(i) = i + 1 (mod p) permutes the basis;
for prime p the orbits have size 1 or p and the fixed monomials are exactly
Π_X^k for 0 <= k <= p - 2.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .fp_linalg import require_prime

log = logging.getLogger("dmcert.dm_basis")

GENERATOR_DEGREE = 2


class DmBasisError(RuntimeError):
    """Base exception for basis enumeration failures."""
    pass


class MalformedMonomialError(DmBasisError):
    """A support key is not a subset of X with at least three members."""
    pass


class InternalInconsistencyError(DmBasisError):
    """An orbit or fixed set contradicts the structure forced by prime p."""
    pass


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class MarkedSet:
    members: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(sorted(set(int(m) for m in self.members))))

    @classmethod
    def of(cls, *members: int) -> "MarkedSet":
        return cls(tuple(members))

    def __len__(self) -> int:
        return len(self.members)

    @property
    def as_set(self) -> FrozenSet[int]:
        return frozenset(self.members)

    def validate(self, p: int) -> None:
        if len(self.members) < 3:
            raise MalformedMonomialError(f"Π_S needs |S| >= 3, got S={list(self.members)}")
        if self.members[0] < 1 or self.members[-1] > p:
            raise MalformedMonomialError(f"S={list(self.members)} is not a subset of X={{1..{p}}}")

    def shifted(self, p: int, steps: int = 1) -> "MarkedSet":
        return MarkedSet(tuple((m - 1 + steps) % p + 1 for m in self.members))


@dataclass(frozen=True)
class Monomial:
    """∏ Π_S^{d_S}; ``factors`` is sorted by support set and holds only d_S > 0."""

    p: int
    factors: Tuple[Tuple[MarkedSet, int], ...] = ()

    def __post_init__(self) -> None:
        merged: Dict[MarkedSet, int] = {}
        for s, d in self.factors:
            if d < 0:
                raise MalformedMonomialError(f"negative exponent {d} on S={list(s.members)}")
            if d:
                merged[s] = merged.get(s, 0) + d
        object.__setattr__(self, "factors", tuple(sorted(merged.items())))

    @classmethod
    def from_exponents(cls, p: int, exponents: Mapping[Iterable[int], int]) -> "Monomial":
        return cls(p, tuple((MarkedSet(tuple(s)), d) for s, d in exponents.items()))

    @classmethod
    def unit(cls, p: int) -> "Monomial":
        return cls(p, ())

    @classmethod
    def pi_x_power(cls, p: int, k: int) -> "Monomial":
        return cls(p, ((MarkedSet(tuple(range(1, p + 1))), k),))

    @property
    def support(self) -> Tuple[MarkedSet, ...]:
        return tuple(s for s, _ in self.factors)

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(d for _, d in self.factors)

    def exponent(self, s: MarkedSet) -> int:
        for t, d in self.factors:
            if t == s:
                return d
        return 0

    @property
    def degree(self) -> int:
        return GENERATOR_DEGREE * sum(self.exponents)

    def sort_key(self) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[int, ...]]:
        return tuple(s.members for s in self.support), self.exponents

    def to_json(self) -> List[Dict[str, object]]:
        return [{"set": list(s.members), "exp": d} for s, d in self.factors]

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        parts = []
        for s, d in self.factors:
            name = "Π_{" + ",".join(str(m) for m in s.members) + "}"
            parts.append(name if d == 1 else f"{name}^{d}")
        return "·".join(parts)


@dataclass(frozen=True)
class GradedBasis:
    p: int
    by_degree: Dict[int, Tuple[Monomial, ...]] = field(default_factory=dict)

    @property
    def degrees(self) -> List[int]:
        return sorted(self.by_degree)

    def dims(self) -> Dict[int, int]:
        return {deg: len(self.by_degree[deg]) for deg in self.degrees}

    @property
    def total(self) -> int:
        return sum(len(v) for v in self.by_degree.values())

    def monomials(self) -> List[Monomial]:
        return [m for deg in self.degrees for m in self.by_degree[deg]]

    def piece(self, degree: int) -> Tuple[Monomial, ...]:
        return self.by_degree.get(degree, ())


@dataclass(frozen=True)
class OrbitDecomposition:
    p: int
    fixed: Tuple[Monomial, ...]
    cycles: Tuple[Tuple[Monomial, ...], ...]

    @property
    def total(self) -> int:
        return len(self.fixed) + self.p * len(self.cycles)

    def fixed_count(self, degree: int) -> int:
        return sum(1 for m in self.fixed if m.degree == degree)

    def cycle_count(self, degree: int) -> int:
        return sum(1 for c in self.cycles if c[0].degree == degree)

    @property
    def degrees(self) -> List[int]:
        return sorted({m.degree for m in self.fixed} | {c[0].degree for c in self.cycles})


# ---------------------------------------------------------------------------
# Admissibility
# ---------------------------------------------------------------------------


def _maximal_children(s: FrozenSet[int], support: List[FrozenSet[int]]) -> List[FrozenSet[int]]:
    inner = [t for t in support if t < s]
    return [t for t in inner if not any(t < u for u in inner)]


def degree_bound(s: FrozenSet[int], children: List[FrozenSet[int]]) -> int:
    """Strict upper bound k - 1 + |S| - sum |S_i| on d_S."""
    return len(children) - 1 + len(s) - sum(len(c) for c in children)


def is_admissible(m: Monomial) -> bool:
    for s in m.support:
        s.validate(m.p)
    support = [s.as_set for s in m.support]
    for i, s in enumerate(support):
        for t in support[i + 1:]:
            inter = s & t
            if inter and inter != s and inter != t:
                return False
    for s, d in zip(support, m.exponents):
        if d >= degree_bound(s, _maximal_children(s, support)):
            return False
    return True


# ---------------------------------------------------------------------------
# Enumeration over laminar forests
# ---------------------------------------------------------------------------

# A forest is (factors, top_count, top_cover): the admissible (set, exponent)
# pairs, how many maximal sets it has and how many points those cover.
_Forest = Tuple[Tuple[Tuple[FrozenSet[int], int], ...], int, int]


def _subsets_containing(universe: FrozenSet[int], x: int, min_size: int) -> List[FrozenSet[int]]:
    rest = sorted(universe - {x})
    out: List[FrozenSet[int]] = []
    n = len(rest)
    for mask in range(1 << n):
        if bin(mask).count("1") + 1 < min_size:
            continue
        out.append(frozenset([x] + [rest[i] for i in range(n) if mask >> i & 1]))
    return out


@lru_cache(maxsize=None)
def _forests(universe: FrozenSet[int]) -> Tuple[_Forest, ...]:
    """All admissible laminar factor lists whose sets lie inside ``universe``."""
    out = list(_proper_forests(universe))
    if len(universe) >= 3:
        out.extend(_crowned(universe, _proper_forests(universe)))
    return tuple(out)


@lru_cache(maxsize=None)
def _proper_forests(universe: FrozenSet[int]) -> Tuple[_Forest, ...]:
    """As :func:`_forests` but never using ``universe`` itself as a set."""
    if len(universe) < 3:
        return (((), 0, 0),)
    x = min(universe)
    out: List[_Forest] = list(_forests(universe - {x}))
    for top in _subsets_containing(universe, x, 3):
        if top == universe:
            continue
        outside = _forests(universe - top)
        for crowned in _crowned(top, _proper_forests(top)):
            factors, _, _ = crowned
            for o_factors, o_tops, o_cover in outside:
                out.append((factors + o_factors, o_tops + 1, o_cover + len(top)))
    return tuple(out)


def _crowned(top: FrozenSet[int], inner: Iterable[_Forest]) -> List[_Forest]:
    """Put ``top`` with every allowed exponent over each inner forest."""
    out: List[_Forest] = []
    for factors, k, cover in inner:
        bound = k - 1 + len(top) - cover
        for d in range(1, bound):
            out.append((factors + ((top, d),), 1, len(top)))
    return out


def enumerate_basis(p: int, max_degree: Optional[int] = None) -> GradedBasis:
    """Admissible monomials for |X| = p, graded and in canonical order.

    ``p`` is the number of permuted labels; composite values are accepted so
    the enumeration can be cross-checked against M̄_{0,n} for any n.
    """
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"need at least two labels, got {p!r}")
    universe = frozenset(range(1, p + 1))
    by_degree: Dict[int, List[Monomial]] = {}
    for factors, _, _ in _forests(universe):
        m = Monomial(p, tuple((MarkedSet(tuple(s)), d) for s, d in factors))
        if max_degree is not None and m.degree > max_degree:
            continue
        by_degree.setdefault(m.degree, []).append(m)
    graded = {deg: tuple(sorted(ms, key=Monomial.sort_key)) for deg, ms in sorted(by_degree.items())}
    basis = GradedBasis(p, graded)
    log.info("basis_enumerated", extra={"p": p, "total": basis.total, "dims": basis.dims()})
    return basis


# ---------------------------------------------------------------------------
# σ action
# ---------------------------------------------------------------------------


def sigma(m: Monomial, steps: int = 1) -> Monomial:
    """Relabel every support set by i -> i + steps (mod p)."""
    return Monomial(m.p, tuple((s.shifted(m.p, steps), d) for s, d in m.factors))


def orbit_decomposition(b: GradedBasis) -> OrbitDecomposition:
    p = require_prime(b.p)
    members = set(b.monomials())
    seen: set = set()
    fixed: List[Monomial] = []
    cycles: List[Tuple[Monomial, ...]] = []
    for m in b.monomials():
        if m in seen:
            continue
        orbit = [m]
        nxt = sigma(m)
        while nxt != m:
            if nxt not in members:
                raise InternalInconsistencyError(f"σ({orbit[-1]}) = {nxt} is not a basis monomial")
            orbit.append(nxt)
            if len(orbit) > p:
                break
            nxt = sigma(nxt)
        if len(orbit) == 1:
            fixed.append(m)
        elif len(orbit) == p:
            cycles.append(tuple(orbit))
        else:
            raise InternalInconsistencyError(f"orbit of {m} has size {len(orbit)}, not 1 or {p}")
        seen.update(orbit)

    expected = [Monomial.unit(p)] + [Monomial.pi_x_power(p, k) for k in range(1, p - 1)]
    if sorted(fixed, key=Monomial.sort_key) != sorted(expected, key=Monomial.sort_key):
        raise InternalInconsistencyError(
            f"fixed monomials {[str(f) for f in fixed]} are not the powers of Π_X below {p - 1}"
        )
    decomp = OrbitDecomposition(p, tuple(fixed), tuple(cycles))
    log.info("orbits_decomposed", extra={"p": p, "fixed": len(fixed), "cycles": len(cycles)})
    return decomp


def degree_permutation(b: GradedBasis, degree: int) -> List[int]:
    """σ on the degree piece as an index permutation of the canonical list."""
    piece = b.piece(degree)
    index = {m: i for i, m in enumerate(piece)}
    return [index[sigma(m)] for m in piece]


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------


def top_degree(p: int) -> int:
    return GENERATOR_DEGREE * (p - 2) if p >= 2 else 0


def poincare_symmetric(b: GradedBasis) -> bool:
    """dim in degree 2k equals dim in degree top - 2k."""
    top = top_degree(b.p)
    dims = b.dims()
    return all(dims.get(deg, 0) == dims.get(top - deg, 0) for deg in range(0, top + 1, 2))


def fixed_subring_relation(p: int) -> Dict[str, object]:
    """The fixed classes are Π_X^k, k < p - 1; Π_X^{p-1} is outside the basis."""
    powers = [Monomial.pi_x_power(p, k) for k in range(1, p)] if p >= 3 else []
    admissible = [k + 1 for k, m in enumerate(powers) if is_admissible(m)]
    return {
        "generator": "Π_X" if p >= 3 else None,
        "admissible_powers": admissible,
        "vanishing_power": p - 1,
        "holds": admissible == list(range(1, p - 1)),
    }
