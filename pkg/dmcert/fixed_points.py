"""Fixed points of the cyclic relabelling on M̄₀,₁₊ₚ, by exact arithmetic in Q(η).

The smooth fixed curves are C_s (1 <= s <= p - 1):

    x_{p+1} = 0,  x_1 = 1,  x_k = η^{s(k-1)}  (2 <= k <= p),

σ maps C_s to an isomorphic curve via z -> η^{-s} z, and no two of them are
isomorphic.  The nodal case is ruled out in :mod:`dmcert.stable_trees`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .cyclotomic import (
    CPoly,
    CyclotomicNumber,
    DegenerateInputError,
    MoebiusMap,
    ProjectivePoint,
    moebius_from_three,
)
from .fp_linalg import FpScalar, require_prime

log = logging.getLogger("dmcert.fixed_points")


class CertificateError(RuntimeError):
    """An internal verification of the fixed-point classification failed."""
    pass


# ---------------------------------------------------------------------------
# Configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MarkedConfig:
    """x_1..x_{p+1} on P¹; ``points[k]`` is x_{k+1}."""

    p: int
    points: Tuple[ProjectivePoint, ...]
    s: Optional[int] = None

    def __post_init__(self) -> None:
        if len(self.points) != self.p + 1:
            raise DegenerateInputError(f"need {self.p + 1} marked points, got {len(self.points)}")
        for a in range(len(self.points)):
            for b in range(a + 1, len(self.points)):
                if self.points[a] == self.points[b]:
                    raise DegenerateInputError(f"x_{a + 1} and x_{b + 1} coincide")

    def point(self, label: int) -> ProjectivePoint:
        """x_label, 1-based."""
        return self.points[label - 1]

    def frame(self) -> Tuple[ProjectivePoint, ProjectivePoint, ProjectivePoint]:
        """(x_1, x_2, x_{p+1}), the triple that pins down isomorphisms."""
        return self.points[0], self.points[1], self.points[self.p]

    def sigma(self) -> "MarkedConfig":
        """Relabel x_i -> x_{i+1} (x_p -> x_1), x_{p+1} fixed."""
        moved = (self.points[self.p - 1],) + self.points[: self.p - 1]
        return MarkedConfig(self.p, moved + (self.points[self.p],), self.s)

    def mapped(self, m: MoebiusMap) -> "MarkedConfig":
        return MarkedConfig(self.p, tuple(m(pt) for pt in self.points), self.s)

    def to_json(self) -> List[List[List[str]]]:
        return [pt.to_json() for pt in self.points]


def fixed_config(p: int, s: int) -> MarkedConfig:
    """C_s: x_{p+1} = 0, x_k = η^{s(k-1)} for 1 <= k <= p."""
    if not 1 <= s <= p - 1:
        raise ValueError(f"s must lie in 1..{p - 1}, got {s}")
    pts = [ProjectivePoint.of(CyclotomicNumber.eta(p, s * (k - 1))) for k in range(1, p + 1)]
    pts.append(ProjectivePoint.of(CyclotomicNumber.zero(p)))
    return MarkedConfig(p, tuple(pts), s)


def isomorphism(c1: MarkedConfig, c2: MarkedConfig) -> MoebiusMap:
    """The unique Möbius map sending the frame of ``c1`` to the frame of ``c2``."""
    return moebius_from_three(c1.frame(), c2.frame())


def is_isomorphic(c1: MarkedConfig, c2: MarkedConfig) -> bool:
    if c1.p != c2.p:
        return False
    m = isomorphism(c1, c2)
    return all(m(a) == b for a, b in zip(c1.points, c2.points))


# ---------------------------------------------------------------------------
# Distinctness by the power map
# ---------------------------------------------------------------------------


def power_map_exponent(p: int, s1: int, s2: int) -> int:
    """The r in 1..p-1 with r·s1 ≡ s2 (mod p); z -> z^r carries C_{s1} onto C_{s2} pointwise."""
    p = require_prime(p)
    if s1 % p == 0 or s2 % p == 0:
        raise ValueError("s1 and s2 must be nonzero mod p")
    return int(FpScalar(s2, p) / s1)


def power_map_agreements(p: int, s1: int, s2: int) -> Tuple[int, int]:
    """(r, number of marked points of C_{s1} where the frame isomorphism agrees with z^r)."""
    r = power_map_exponent(p, s1, s2)
    src, dst = fixed_config(p, s1), fixed_config(p, s2)
    m = isomorphism(src, dst)
    count = 0
    for pt in src.points:
        z = pt.affine()
        if m(pt) == ProjectivePoint.of(z ** r):
            count += 1
    return r, count


def distinct_by_power_map(p: int, s1: int, s2: int) -> bool:
    """C_{s1} and C_{s2} are non-isomorphic for s1 != s2.

    An isomorphism must agree with z -> z^r on all p + 1 marked points, but
    (az + b) - z^r (cz + d) has degree at most r + 1 <= p, so for r >= 2 at
    most r + 1 points can agree.
    """
    r, count = power_map_agreements(p, s1, s2)
    if r == 1:
        return False
    return count <= r + 1 < p + 1


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def enumerate_fixed(p: int) -> List[MarkedConfig]:
    """C_1..C_{p-1}, each checked σ-fixed and pairwise non-isomorphic."""
    p = require_prime(p)
    if p < 3:
        raise ValueError("p = 2 has no configurations to enumerate: M̄₀,₃ is a single point")
    configs = [fixed_config(p, s) for s in range(1, p)]
    for c in configs:
        if not is_isomorphic(c.sigma(), c):
            raise CertificateError(f"C_{c.s} is not σ-fixed")
        rotation = MoebiusMap.scaling(CyclotomicNumber.eta(p, -(c.s or 0)))
        if c.mapped(rotation).points != c.sigma().points:
            raise CertificateError(f"z -> η^-{c.s} z does not realise σ on C_{c.s}")
    for a in range(len(configs)):
        for b in range(a + 1, len(configs)):
            if is_isomorphic(configs[a], configs[b]):
                raise CertificateError(f"C_{a + 1} and C_{b + 1} are isomorphic")
            if not distinct_by_power_map(p, a + 1, b + 1):
                raise CertificateError(f"power-map bound fails for C_{a + 1}, C_{b + 1}")
    log.info("fixed_points_enumerated", extra={"p": p, "count": len(configs)})
    return configs


# ---------------------------------------------------------------------------
# Möbius-power degree argument
# ---------------------------------------------------------------------------


def _phi_matrix(p: int) -> Tuple[Tuple[CPoly, CPoly], Tuple[CPoly, CPoly]]:
    """φ = [[η, 0], [c, 1 - c]] with entries in Q(η)[c]."""
    eta = CPoly.constant(CyclotomicNumber.eta(p))
    zero = CPoly(p)
    one = CPoly.constant(CyclotomicNumber.one(p))
    c = CPoly.c(p)
    return (eta, zero), (c, one - c)


def _mat_mul(x: Sequence[Sequence[CPoly]], y: Sequence[Sequence[CPoly]]) -> Tuple[Tuple[CPoly, CPoly], Tuple[CPoly, CPoly]]:
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def moebius_power(p: int, n: int) -> Tuple[Tuple[CPoly, CPoly], Tuple[CPoly, CPoly]]:
    """φ^n as a matrix over Q(η)[c]."""
    phi = _phi_matrix(p)
    one = CPoly.constant(CyclotomicNumber.one(p))
    acc: Tuple[Tuple[CPoly, CPoly], Tuple[CPoly, CPoly]] = ((one, CPoly(p)), (CPoly(p), one))
    for _ in range(n):
        acc = _mat_mul(phi, acc)
    return acc


def closing_denominator(p: int) -> CPoly:
    """Denominator of φ^{p-1}(η) = 1 / (C(c)·η + D(c)), whose numerator η^p is 1."""
    (_, _), (cc, dd) = moebius_power(p, p - 1)
    return cc.scale(CyclotomicNumber.eta(p)) + dd


def moebius_power_degree(p: int) -> Dict[str, object]:
    """φ^{p-1}: c-free numerator, denominator of degree exactly p - 1 in c."""
    p = require_prime(p)
    if p < 3:
        raise ValueError("the Möbius-power argument needs p >= 3")
    (a, b), (cc, dd) = moebius_power(p, p - 1)
    den = closing_denominator(p)
    numerator_c_free = a.degree <= 0 and b.is_zero()
    zero = CyclotomicNumber.zero(p)
    at_zero = MoebiusMap(a.evaluate(zero), b.evaluate(zero), cc.evaluate(zero), dd.evaluate(zero))
    rotation = at_zero.projectively_equal(MoebiusMap.scaling(CyclotomicNumber.eta(p, p - 1)))
    report: Dict[str, object] = {
        "p": p,
        "numerator_c_free": numerator_c_free,
        "denominator_degree": den.degree,
        "denominator": den,
        "rotation_at_c_zero": rotation,
        "holds": numerator_c_free and den.degree == p - 1 and rotation,
    }
    log.info("moebius_power_degree", extra={"p": p, "degree": den.degree, "holds": report["holds"]})
    return report


def fixed_moebius_roots(p: int) -> List[Tuple[int, CyclotomicNumber]]:
    """(j, 1 - η^j) for j in {0, 2, 3, ..., p-1}; j = 1 gives a parabolic φ."""
    return [(j, 1 - CyclotomicNumber.eta(p, j)) for j in range(p) if j != 1]


def solve_fixed_moebius(p: int) -> Dict[str, object]:
    """Tie the p - 1 roots of D(c) - 1 to the configurations C_s.

    With x_{p+1} = 0, x_1 = 1, x_2 = η a fixed smooth curve is the orbit of 1
    under φ(z) = ηz / (cz + 1 - c), closed exactly when D(c) = 1.
    """
    p = require_prime(p)
    if p < 3:
        raise ValueError("the Möbius normal form needs p >= 3")
    den = closing_denominator(p)
    one = CyclotomicNumber.one(p)
    fixed = [fixed_config(p, s) for s in range(1, p)]
    matches: List[int] = []
    all_roots = True
    for j, c in fixed_moebius_roots(p):
        if not (den.evaluate(c) - one).is_zero():
            all_roots = False
            continue
        phi = MoebiusMap(CyclotomicNumber.eta(p), CyclotomicNumber.zero(p), c, 1 - c)
        pts = [ProjectivePoint.of(one)]
        for _ in range(p - 1):
            pts.append(phi(pts[-1]))
        pts.append(ProjectivePoint.of(CyclotomicNumber.zero(p)))
        try:
            config = MarkedConfig(p, tuple(pts))
        except DegenerateInputError:
            all_roots = False
            continue
        hits = [f.s for f in fixed if is_isomorphic(config, f)]
        if len(hits) == 1 and hits[0] is not None:
            matches.append(hits[0])
    # c_a - c_b = η^b - η^a has norm p, so the roots are pairwise distinct
    roots = [c for _, c in fixed_moebius_roots(p)]
    roots_distinct = all((a - b).norm() == p for a, b in combinations(roots, 2))
    ok = all_roots and roots_distinct and sorted(matches) == list(range(1, p))
    log.info("solve_fixed_moebius", extra={"p": p, "roots": p - 1, "matches": matches, "ok": ok})
    return {
        "p": p,
        "roots": p - 1,
        "all_roots": all_roots,
        "roots_distinct": roots_distinct,
        "matches": matches,
        "holds": ok,
    }
