"""Z/p-equivariant cochains of a finite complex with Z/p action.

The Borel complex is F_p[u] ⊗ Λ[e] ⊗ C*(X) with

    d(u^k ⊗ c)   = e u^k ⊗ (gc - c) + u^k ⊗ dc
    d(u^k e ⊗ c) = u^{k+1} ⊗ (c + gc + ... + g^{p-1} c) - u^k e ⊗ dc

truncated at a total degree ``d_total``; cohomology is only reported up to
``d_total - 2`` so no kernel or image touches the truncation edge.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import get_settings
from .cyclic_cohomology import PermRepresentation
from .fp_linalg import (
    FpMatrix,
    NotAComplexError,
    cohomology_dim,
    norm_matrix,
    require_prime,
)

log = logging.getLogger("dmcert.equivariant_cochains")


class InvalidComplexError(ValueError):
    """d∘d != 0, g^p != 1, or g does not commute with d."""
    pass


class InvalidMapError(ValueError):
    """A supplied restriction map does not commute with d and g."""
    pass


# ---------------------------------------------------------------------------
# Finite G-complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGComplex:
    """C^0..C^D with d[q] : C^q -> C^{q+1} and the generator g acting in each degree."""

    p: int
    dims: Tuple[int, ...]
    d: Tuple[FpMatrix, ...]
    g: Tuple[FpMatrix, ...]

    def __post_init__(self) -> None:
        require_prime(self.p)
        top = len(self.dims) - 1
        if top < 0:
            raise InvalidComplexError("a complex needs at least degree 0")
        if len(self.d) != top or len(self.g) != top + 1:
            raise InvalidComplexError(f"{len(self.dims)} degrees need {top} differentials and {top + 1} actions")
        for q, n in enumerate(self.dims):
            g = self.g[q]
            if g.modulus != self.p or g.shape != (n, n):
                raise InvalidComplexError(f"g in degree {q} has shape {g.shape} over F_{g.modulus}, expected ({n}, {n})")
            if g.power(self.p) != FpMatrix.identity(n, self.p):
                raise InvalidComplexError(f"g^p != 1 in degree {q}")
        for q, d in enumerate(self.d):
            if d.modulus != self.p or d.shape != (self.dims[q + 1], self.dims[q]):
                raise InvalidComplexError(f"d in degree {q} has shape {d.shape}")
            if not (d @ self.g[q] - self.g[q + 1] @ d).is_zero():
                raise InvalidComplexError(f"g does not commute with d in degree {q}")
        for q in range(top - 1):
            if not (self.d[q + 1] @ self.d[q]).is_zero():
                raise InvalidComplexError(f"d∘d != 0 out of degree {q}")

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def dim(self, q: int) -> int:
        return self.dims[q] if 0 <= q <= self.top else 0

    def differential(self, q: int) -> FpMatrix:
        if 0 <= q < self.top:
            return self.d[q]
        return FpMatrix.zeros(self.dim(q + 1), self.dim(q), self.p)

    def action(self, q: int) -> FpMatrix:
        if 0 <= q <= self.top:
            return self.g[q]
        return FpMatrix.zeros(0, 0, self.p)

    def is_trivial_action(self) -> bool:
        return all(g == FpMatrix.identity(n, self.p) for g, n in zip(self.g, self.dims))

    # --- constructors ---

    @classmethod
    def concentrated(cls, p: int, action: FpMatrix) -> "FiniteGComplex":
        return cls(p, (action.rows,), (), (action,))

    @classmethod
    def empty(cls, p: int) -> "FiniteGComplex":
        return cls.concentrated(p, FpMatrix.zeros(0, 0, p))

    @classmethod
    def point(cls, p: int) -> "FiniteGComplex":
        return cls.from_rep(PermRepresentation.trivial(p))

    @classmethod
    def fixed_points(cls, p: int, count: int) -> "FiniteGComplex":
        return cls.concentrated(p, FpMatrix.identity(count, p))

    @classmethod
    def free_orbit(cls, p: int) -> "FiniteGComplex":
        return cls.from_rep(PermRepresentation.regular(p))

    @classmethod
    def from_rep(cls, rep: PermRepresentation) -> "FiniteGComplex":
        return cls.concentrated(rep.p, rep.action)

    def disjoint_union(self, other: "FiniteGComplex") -> "FiniteGComplex":
        if other.p != self.p:
            raise InvalidComplexError(f"Z/{self.p} vs Z/{other.p}")
        top = max(self.top, other.top)
        dims = tuple(self.dim(q) + other.dim(q) for q in range(top + 1))
        d = tuple(
            FpMatrix.block_diagonal([self.differential(q), other.differential(q)], self.p) for q in range(top)
        )
        g = tuple(FpMatrix.block_diagonal([self.action(q), other.action(q)], self.p) for q in range(top + 1))
        return FiniteGComplex(self.p, dims, d, g)

    @classmethod
    def from_json(cls, data: Union[str, Dict[str, Any]]) -> "FiniteGComplex":
        """``{"p": int, "degrees": [{"dim": int, "d": [[int]], "g": [[int]]}, ...]}``; ``d`` absent in the top degree."""
        try:
            obj = json.loads(data) if isinstance(data, str) else data
            p = require_prime(int(obj["p"]))
            degrees = obj["degrees"]
            dims = tuple(int(deg["dim"]) for deg in degrees)
            g = tuple(FpMatrix.from_rows(deg["g"], p, cols=dims[q]) for q, deg in enumerate(degrees))
            d = tuple(
                FpMatrix.from_rows(deg.get("d", []), p, cols=dims[q]) for q, deg in enumerate(degrees[:-1])
            )
        except (KeyError, TypeError, IndexError, json.JSONDecodeError) as e:
            raise InvalidComplexError(f"malformed complex JSON: {e}") from e
        return cls(p, dims, d, g)


# ---------------------------------------------------------------------------
# Borel complex
# ---------------------------------------------------------------------------

# (k, ε, q): the block u^k e^ε ⊗ C^q.
Block = Tuple[int, int, int]


@dataclass(frozen=True)
class BorelComplex:
    p: int
    d_total: int
    labels: Dict[int, Tuple[str, ...]]
    blocks: Dict[int, Tuple[Block, ...]]
    differentials: Tuple[FpMatrix, ...]

    def size(self, n: int) -> int:
        return len(self.labels.get(n, ()))


def _blocks(c: FiniteGComplex, n: int) -> List[Block]:
    out: List[Block] = []
    for k in range(n // 2 + 1):
        for eps in (0, 1):
            q = n - 2 * k - eps
            if 0 <= q <= c.top and c.dim(q):
                out.append((k, eps, q))
    return out


def _block_label(block: Block, index: int) -> str:
    k, eps, q = block
    u = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
    return f"{u}{'e' if eps else ''}{'⊗' if u or eps else ''}c{q}.{index}"


def build_borel(c: FiniteGComplex, d_total: int) -> BorelComplex:
    """Assemble the truncated Borel complex and check d∘d = 0 below the edge."""
    if d_total < 2:
        raise ValueError(f"d_total must be >= 2, got {d_total}")
    p = c.p
    blocks = {n: tuple(_blocks(c, n)) for n in range(d_total + 1)}
    offsets: Dict[int, Dict[Block, int]] = {}
    labels: Dict[int, Tuple[str, ...]] = {}
    for n, bs in blocks.items():
        off, names = 0, []
        offsets[n] = {}
        for b in bs:
            offsets[n][b] = off
            names.extend(_block_label(b, i) for i in range(c.dim(b[2])))
            off += c.dim(b[2])
        labels[n] = tuple(names)

    norms = [norm_matrix(c.action(q), p) for q in range(c.top + 1)]

    def place(arr: np.ndarray, n: int, src: Block, dst: Block, m: FpMatrix) -> None:
        if dst not in offsets[n + 1]:
            return
        r0, c0 = offsets[n + 1][dst], offsets[n][src]
        arr[r0:r0 + m.rows, c0:c0 + m.cols] += m.data

    diffs: List[FpMatrix] = []
    for n in range(d_total):
        arr = np.zeros((len(labels[n + 1]), len(labels[n])), dtype=np.int64)
        for (k, eps, q) in blocks[n]:
            g = c.action(q)
            dc = c.differential(q)
            if eps == 0:
                place(arr, n, (k, 0, q), (k, 1, q), g - FpMatrix.identity(c.dim(q), p))
                place(arr, n, (k, 0, q), (k, 0, q + 1), dc)
            else:
                place(arr, n, (k, 1, q), (k + 1, 0, q), norms[q])
                place(arr, n, (k, 1, q), (k, 1, q + 1), -dc)
        diffs.append(FpMatrix(p, arr))

    for n in range(d_total - 1):
        if not (diffs[n + 1] @ diffs[n]).is_zero():
            raise NotAComplexError(f"Borel differential squares to nonzero out of total degree {n}")
    log.debug("borel_built", extra={"p": p, "d_total": d_total, "sizes": [len(labels[n]) for n in range(d_total + 1)]})
    return BorelComplex(p, d_total, labels, blocks, tuple(diffs))


def borel_cohomology_dims(b: BorelComplex) -> List[int]:
    """dim H^n of the Borel complex for n = 0..d_total-2."""
    out: List[int] = []
    for n in range(b.d_total - 1):
        d_in = b.differentials[n - 1] if n > 0 else FpMatrix.zeros(b.size(0), 0, b.p)
        out.append(cohomology_dim(d_in, b.differentials[n]))
    return out


# ---------------------------------------------------------------------------
# Localization
# ---------------------------------------------------------------------------


def fixed_point_restriction(c: FiniteGComplex) -> Tuple[FiniteGComplex, List[FpMatrix]]:
    """For a permutation complex in degree 0: the g-fixed basis points and restriction onto them."""
    if c.top != 0:
        raise InvalidComplexError("fixed-point restriction is only built for complexes concentrated in degree 0")
    g = c.action(0)
    ident = FpMatrix.identity(c.dim(0), c.p)
    fixed = [i for i in range(c.dim(0)) if g.column(i) == ident.column(i)]
    rows = [[1 if col == i else 0 for col in range(c.dim(0))] for i in fixed]
    return FiniteGComplex.fixed_points(c.p, len(fixed)), [FpMatrix.from_rows(rows, c.p, cols=c.dim(0))]


def _check_restriction(c: FiniteGComplex, fixed_sub: FiniteGComplex, restriction: Sequence[FpMatrix]) -> None:
    if not fixed_sub.is_trivial_action():
        raise InvalidComplexError("the fixed subcomplex must carry the trivial action")
    top = max(c.top, fixed_sub.top)
    maps = [
        restriction[q] if q < len(restriction) else FpMatrix.zeros(fixed_sub.dim(q), c.dim(q), c.p)
        for q in range(top + 1)
    ]
    for q, r in enumerate(maps):
        if r.shape != (fixed_sub.dim(q), c.dim(q)):
            raise InvalidMapError(f"restriction in degree {q} has shape {r.shape}")
        if not (r @ c.action(q) - fixed_sub.action(q) @ r).is_zero():
            raise InvalidMapError(f"restriction does not commute with g in degree {q}")
        if q < top and not (maps[q + 1] @ c.differential(q) - fixed_sub.differential(q) @ r).is_zero():
            raise InvalidMapError(f"restriction does not commute with d in degree {q}")


def stabilized_dims(c: FiniteGComplex, window: int, top: Optional[int] = None) -> List[int]:
    """Borel dims in the ``window`` total degrees just above degree ``top`` (default: every cell of ``c``)."""
    lo = (c.top if top is None else top) + 2
    return borel_cohomology_dims(build_borel(c, lo + window + 2))[lo:lo + window]


def localization_check(
    c: FiniteGComplex,
    fixed_sub: FiniteGComplex,
    restriction: Sequence[FpMatrix],
    window: Optional[int] = None,
) -> bool:
    """Stabilized high-degree Borel dims of ``c`` and of its fixed locus agree."""
    if window is None:
        window = get_settings().localization_window
    if window < 2:
        raise ValueError(f"window must be >= 2 to see 2-periodicity, got {window}")
    if fixed_sub.p != c.p:
        raise InvalidComplexError(f"Z/{c.p} vs Z/{fixed_sub.p}")
    _check_restriction(c, fixed_sub, restriction)
    top = max(c.top, fixed_sub.top)
    ours = stabilized_dims(c, window, top)
    theirs = stabilized_dims(fixed_sub, window, top)
    ok = ours == theirs
    log.info("localization_check", extra={"p": c.p, "window": window, "ours": ours, "fixed": theirs, "ok": ok})
    return ok
