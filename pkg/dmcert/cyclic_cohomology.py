"""H^i(BZ/p; A) for finite F_p[Z/p]-modules A.

Uses the 2-periodic cell structure of EZ/p: C^i is free on Δ^i and

    δΔ^i = (σ - 1) Δ^{i+1}              for i even,
    δΔ^i = (1 + σ + ... + σ^{p-1}) Δ^{i+1}  for i odd,

so with coefficients in A the complex is A --(σ-1)--> A --N--> A --(σ-1)--> ...
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .fp_linalg import (
    FpMatrix,
    FpVector,
    cohomology_dim,
    cyclic_shift,
    kernel_basis,
    nullity,
    norm_matrix,
    require_prime,
)

log = logging.getLogger("dmcert.cyclic_cohomology")


class InvalidRepresentationError(ValueError):
    """σ is not an invertible matrix of order dividing p."""
    pass


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PermRepresentation:
    p: int
    action: FpMatrix

    def __post_init__(self) -> None:
        require_prime(self.p)
        if self.action.modulus != self.p:
            raise InvalidRepresentationError(f"action is over F_{self.action.modulus}, not F_{self.p}")
        n = self.action.rows
        if self.action.cols != n or n < 1:
            raise InvalidRepresentationError(f"σ must be a nonempty square matrix, got {self.action.shape}")
        if self.action.power(self.p) != FpMatrix.identity(n, self.p):
            raise InvalidRepresentationError("σ^p != 1")

    @property
    def dimension(self) -> int:
        return self.action.rows

    @classmethod
    def trivial(cls, p: int, dimension: int = 1) -> "PermRepresentation":
        return cls(p, FpMatrix.identity(dimension, p))

    @classmethod
    def regular(cls, p: int) -> "PermRepresentation":
        return cls(p, cyclic_shift(p, p))

    @classmethod
    def from_permutation(cls, p: int, perm: Sequence[int]) -> "PermRepresentation":
        return cls(p, FpMatrix.permutation(perm, p))

    def direct_sum(self, other: "PermRepresentation") -> "PermRepresentation":
        if other.p != self.p:
            raise InvalidRepresentationError(f"Z/{self.p} vs Z/{other.p}")
        return PermRepresentation(self.p, FpMatrix.block_diagonal([self.action, other.action], self.p))


@dataclass(frozen=True)
class PeriodicResolutionDifferential:
    even: FpMatrix
    odd: FpMatrix

    @classmethod
    def for_representation(cls, rep: PermRepresentation) -> "PeriodicResolutionDifferential":
        n = rep.dimension
        even = rep.action - FpMatrix.identity(n, rep.p)
        odd = norm_matrix(rep.action, rep.p)
        diff = cls(even, odd)
        if not (even @ odd).is_zero() or not (odd @ even).is_zero():
            raise InvalidRepresentationError("(σ-1)N != 0; σ does not have order dividing p")
        return diff

    def leaving(self, i: int) -> FpMatrix:
        """The differential C^i -> C^{i+1}."""
        return self.even if i % 2 == 0 else self.odd


# ---------------------------------------------------------------------------
# Cohomology
# ---------------------------------------------------------------------------


def default_max_i(p: int) -> int:
    return 2 * p + 2


def group_cohomology_dims(rep: PermRepresentation, max_i: Optional[int] = None) -> List[int]:
    """[dim H^0, ..., dim H^max_i] of BZ/p with coefficients in ``rep``."""
    if max_i is None:
        max_i = default_max_i(rep.p)
    if max_i < 0:
        raise ValueError(f"max_i must be >= 0, got {max_i}")
    diff = PeriodicResolutionDifferential.for_representation(rep)
    dims = [nullity(diff.leaving(0))]
    # From degree 1 on the answer depends only on the parity of i.
    if max_i >= 1:
        odd_dim = cohomology_dim(diff.leaving(0), diff.leaving(1))
        even_dim = cohomology_dim(diff.leaving(1), diff.leaving(2))
        dims.extend(odd_dim if i % 2 else even_dim for i in range(1, max_i + 1))
    log.debug("group_cohomology", extra={"p": rep.p, "dimension": rep.dimension, "dims": dims[:4]})
    return dims


def decompose_permutation_rep(basis_size: int, sigma_as_permutation: Sequence[int], *, p: int) -> Tuple[int, int]:
    """(number of 1-cycles, number of p-cycles) of a permutation of order dividing p."""
    p = require_prime(p)
    perm = list(sigma_as_permutation)
    if len(perm) != basis_size or sorted(perm) != list(range(basis_size)):
        raise InvalidRepresentationError(f"not a permutation of {basis_size} elements")
    seen = [False] * basis_size
    fixed = cycles = 0
    for start in range(basis_size):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        if length == 1:
            fixed += 1
        elif length == p:
            cycles += 1
        else:
            raise InvalidRepresentationError(f"cycle of length {length} is impossible for Z/{p}")
    return fixed, cycles


def permutation_rep_dims(p: int, fixed: int, cycles: int, max_i: Optional[int] = None) -> List[int]:
    """fixed * (trivial answer) + cycles * (regular answer)."""
    triv = group_cohomology_dims(PermRepresentation.trivial(p), max_i)
    reg = group_cohomology_dims(PermRepresentation.regular(p), max_i)
    return [fixed * t + cycles * r for t, r in zip(triv, reg)]


def regular_coboundary_witness(p: int, i: int, cochain: Sequence[int]) -> FpVector:
    """A preimage under δ of the closed cochain Δ^i ⊗ Σ c_j v_j, i >= 1, in the regular module.

    Even i: coefficients are constant c, take (c, 0, ..., 0) since δ from odd
    degree is N.  Odd i: coefficients sum to zero, take a_j = -(c_1 + ... + c_j)
    against δ = σ - 1 (indices from 0).
    """
    p = require_prime(p)
    if i < 1:
        raise ValueError("H^0 classes have no coboundary witness")
    c = [x % p for x in cochain]
    if len(c) != p:
        raise ValueError(f"regular module has dimension {p}, got {len(c)} coefficients")
    if i % 2 == 0:
        if len(set(c)) != 1:
            raise ValueError("even-degree cochain is not closed (coefficients differ)")
        return FpVector(p, [c[0]] + [0] * (p - 1))
    if sum(c) % p:
        raise ValueError("odd-degree cochain is not closed (coefficients do not sum to 0)")
    # δ = σ - 1 with σ v_j = v_{j+1}: (δa)_j = a_{j-1} - a_j.
    partial = [0]
    for x in c[1:]:
        partial.append((partial[-1] - x) % p)
    return FpVector(p, partial)


def certify_regular_vanishing(p: int, max_i: Optional[int] = None) -> Tuple[int, List[int]]:
    """Check that closed regular-module cochains in degrees 1..max_i are coboundaries.

    Runs over a kernel basis in each degree and applies the differential to the
    preimage from :func:`regular_coboundary_witness`.  Returns the number of
    cochains checked and the degrees where a witness failed.
    """
    p = require_prime(p)
    if max_i is None:
        max_i = default_max_i(p)
    diff = PeriodicResolutionDifferential.for_representation(PermRepresentation.regular(p))
    checked = 0
    failed: List[int] = []
    for i in range(1, max_i + 1):
        for closed in kernel_basis(diff.leaving(i)):
            checked += 1
            if diff.leaving(i - 1) @ regular_coboundary_witness(p, i, closed.entries) != closed:
                failed.append(i)
                break
    log.debug("regular_vanishing", extra={"p": p, "max_i": max_i, "checked": checked, "failed": failed})
    return checked, failed


# ---------------------------------------------------------------------------
# Cycle notation
# ---------------------------------------------------------------------------

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycle_notation(text: str, size: Optional[int] = None) -> List[int]:
    """``"(1 2 3)(4)"`` -> 0-based image list; labels are 1-based."""
    cycles = [[int(tok) for tok in body.replace(",", " ").split()] for body in _CYCLE_RE.findall(text)]
    leftover = _CYCLE_RE.sub("", text).strip()
    if leftover or not cycles:
        raise ValueError(f"cannot parse cycle notation {text!r}")
    labels = [x for cyc in cycles for x in cyc]
    if len(labels) != len(set(labels)) or min(labels) < 1:
        raise ValueError(f"cycles in {text!r} must use distinct labels >= 1")
    n = max(max(labels), size or 0)
    perm = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            perm[a - 1] = b - 1
    return perm
