"""Slow, independent re-implementations used only as test oracles."""
from __future__ import annotations

import itertools
import math
from typing import Dict, FrozenSet, Iterator, List, Sequence, Tuple


# ---------------------------------------------------------------------------
# Brute-force cohomology over F_p
# ---------------------------------------------------------------------------


def _apply(m: Sequence[Sequence[int]], v: Sequence[int], p: int) -> Tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(row, v)) % p for row in m)


def brute_cohomology_dim(d_in: Sequence[Sequence[int]], d_out: Sequence[Sequence[int]], n: int, src: int, p: int) -> int:
    """dim ker(d_out)/im(d_in) by listing every vector; ``n`` = middle dim, ``src`` = dim before."""
    cocycles = sum(
        1 for v in itertools.product(range(p), repeat=n) if not any(_apply(d_out, v, p))
    ) if d_out else p ** n
    images = {_apply(d_in, v, p) for v in itertools.product(range(p), repeat=src)} if d_in else {(0,) * n}
    return round(math.log(cocycles, p)) - round(math.log(len(images), p))


def brute_group_cohomology(action: Sequence[Sequence[int]], p: int, max_i: int) -> List[int]:
    """H^i(BZ/p; A) from the periodic complex, every kernel and image enumerated."""
    n = len(action)
    minus = [[(action[r][c] - (r == c)) % p for c in range(n)] for r in range(n)]
    norm = [[0] * n for _ in range(n)]
    power = [[int(r == c) for c in range(n)] for r in range(n)]
    for _ in range(p):
        norm = [[(norm[r][c] + power[r][c]) % p for c in range(n)] for r in range(n)]
        power = [[sum(power[r][k] * action[k][c] for k in range(n)) % p for c in range(n)] for r in range(n)]
    dims = [brute_cohomology_dim([], minus, n, 0, p)]
    for i in range(1, max_i + 1):
        d_in, d_out = (minus, norm) if i % 2 else (norm, minus)
        dims.append(brute_cohomology_dim(d_in, d_out, n, n, p))
    return dims


# ---------------------------------------------------------------------------
# Generate-and-filter basis
# ---------------------------------------------------------------------------


def _laminar_families(sets: List[FrozenSet[int]]) -> Iterator[Tuple[FrozenSet[int], ...]]:
    def grow(start: int, chosen: Tuple[FrozenSet[int], ...]) -> Iterator[Tuple[FrozenSet[int], ...]]:
        yield chosen
        for k in range(start, len(sets)):
            s = sets[k]
            if all(not (s & t) or s <= t or t <= s for t in chosen):
                yield from grow(k + 1, chosen + (s,))
    return grow(0, ())


def filtered_basis(n: int) -> Dict[int, List[Tuple[Tuple[Tuple[int, ...], int], ...]]]:
    """Every laminar support with every exponent map in 1..n, kept iff each d_S meets its bound.

    Returns degree -> sorted list of ((members, exponent), ...) tuples.
    """
    labels = range(1, n + 1)
    sets = [frozenset(c) for size in range(3, n + 1) for c in itertools.combinations(labels, size)]
    out: Dict[int, List[Tuple[Tuple[Tuple[int, ...], int], ...]]] = {}
    for family in _laminar_families(sets):
        for exps in itertools.product(range(1, n + 1), repeat=len(family)):
            ok = True
            for s, d in zip(family, exps):
                inner = [t for t in family if t < s]
                maximal = [t for t in inner if not any(t < u for u in inner)]
                if d >= len(maximal) - 1 + len(s) - sum(len(t) for t in maximal):
                    ok = False
                    break
            if ok:
                key = tuple(sorted((tuple(sorted(s)), d) for s, d in zip(family, exps)))
                out.setdefault(2 * sum(exps), []).append(key)
    return {deg: sorted(v) for deg, v in sorted(out.items())}


# ---------------------------------------------------------------------------
# Stable trees through set partitions
# ---------------------------------------------------------------------------


def set_partitions(items: Sequence[int]) -> Iterator[List[List[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def count_rooted_trees(labels: Tuple[int, ...]) -> int:
    """Trees with leaves ``labels`` hanging below a root, every internal vertex branching at least twice.

    With x_{p+1} at the root these are the stable trees with p + 1 marked points.
    """
    if len(labels) == 1:
        return 1
    total = 0
    for part in set_partitions(list(labels)):
        if len(part) < 2:
            continue
        prod = 1
        for block in part:
            prod *= count_rooted_trees(tuple(block))
        total += prod
    return total
