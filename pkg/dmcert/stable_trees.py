"""Stable genus-zero dual trees with marked points x_1..x_{p+1}.

A labelled dual tree is stored as its split system: every edge cuts the
labels in two, and we keep the side A ⊆ X = {1..p} that misses x_{p+1}.
Two splits are compatible iff they are nested or disjoint, and every laminar
family of nonempty subsets of X is the split system of exactly one rooted
tree (the root carries x_{p+1}).  Stability is then the size condition
2 <= |A| <= p - 1.  The sorted split system is the canonical form.

σ acts on labels by x_i -> x_{i+1} (indices mod p), x_{p+1} fixed.  A nodal
curve is σ-fixed iff its tree has a vertex bijection preserving edges that
moves the vertex of every x_ℓ to the vertex of σ(x_ℓ).
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .config import get_settings
from .fp_linalg import require_prime

log = logging.getLogger("dmcert.stable_trees")

ROOT = -1

CASE_FIXED_POINT_FREE = "fixed_point_free"
CASE_UNEQUAL_LABEL_COUNTS = "unequal_label_counts"
CASE_STABILITY = "stability"


class ResourceGuardError(RuntimeError):
    """Enumeration was refused because p exceeds the configured bound."""
    pass


def _compatible(a: FrozenSet[int], b: FrozenSet[int]) -> bool:
    return not (a & b) or a <= b or b <= a


@dataclass(frozen=True)
class DualTree:
    """Any laminar split system; no stability condition."""

    p: int
    splits: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        splits = tuple(sorted(tuple(sorted(s)) for s in self.splits))
        sets = [frozenset(s) for s in splits]
        for s, members in zip(sets, splits):
            if not s:
                raise ValueError("empty split")
            if len(s) != len(members) or min(s) < 1 or max(s) > self.p:
                raise ValueError(f"split {list(members)} is not a subset of X={{1..{self.p}}}")
        if len(set(sets)) != len(sets):
            raise ValueError(f"repeated split in {[list(s) for s in splits]}")
        for a, b in combinations(sets, 2):
            if not _compatible(a, b):
                raise ValueError(f"splits {sorted(a)} and {sorted(b)} cross")
        object.__setattr__(self, "splits", splits)

    @property
    def vertex_count(self) -> int:
        return len(self.splits) + 1

    @property
    def vertices(self) -> List[int]:
        return [ROOT] + list(range(len(self.splits)))

    @cached_property
    def _parents(self) -> Tuple[int, ...]:
        sets = [frozenset(s) for s in self.splits]
        out = []
        for s in sets:
            over = [k for k, t in enumerate(sets) if s < t]
            out.append(min(over, key=lambda k: len(sets[k])) if over else ROOT)
        return tuple(out)

    @cached_property
    def _labels(self) -> Dict[int, Tuple[int, ...]]:
        covered: Dict[int, set] = {v: set() for v in self.vertices}
        for v, parent in enumerate(self._parents):
            covered[parent].update(self.splits[v])
        out: Dict[int, Tuple[int, ...]] = {}
        for v in self.vertices:
            own = set(range(1, self.p + 1)) if v == ROOT else set(self.splits[v])
            labels = sorted(own - covered[v])
            out[v] = tuple(labels + [self.p + 1]) if v == ROOT else tuple(labels)
        return out

    @cached_property
    def adjacency(self) -> Dict[int, FrozenSet[int]]:
        nbrs: Dict[int, set] = {v: set() for v in self.vertices}
        for a, b in self.edges():
            nbrs[a].add(b)
            nbrs[b].add(a)
        return {v: frozenset(n) for v, n in nbrs.items()}

    def parent(self, v: int) -> int:
        """Index of the smallest split strictly containing split ``v``, or ROOT."""
        return self._parents[v]

    def edges(self) -> List[Tuple[int, int]]:
        return [(self._parents[v], v) for v in range(len(self.splits))]

    def labels_at(self, v: int) -> Tuple[int, ...]:
        """Marked labels sitting on vertex ``v`` (ROOT carries p + 1)."""
        return self._labels[v]

    def vertex_of(self, label: int) -> int:
        for v, labels in self._labels.items():
            if label in labels:
                return v
        raise KeyError(label)

    def valence(self, v: int) -> int:
        """Marked labels plus incident edges."""
        return len(self._labels[v]) + len(self.adjacency[v])

    def is_stable(self) -> bool:
        return all(self.valence(v) >= 3 for v in self.vertices)

    def relabelled(self, steps: int = 1) -> "DualTree":
        """Image under x_i -> x_{i+steps} (indices mod p), x_{p+1} fixed."""
        return type(self)(self.p, tuple(tuple((m - 1 + steps) % self.p + 1 for m in s) for s in self.splits))

    def to_json(self) -> List[List[int]]:
        return [list(s) for s in self.splits]


class StableTree(DualTree):
    """A dual tree of a stable curve: every split has 2 <= |A| <= p - 1."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for s in self.splits:
            if not 2 <= len(s) <= self.p - 1:
                raise ValueError(f"split {list(s)} violates 2 <= |A| <= {self.p - 1}")


def compatible_automorphisms(tree: DualTree, steps: int = 1) -> int:
    """Number of tree automorphisms carrying vertex(x_ℓ) to vertex(σ^steps x_ℓ) for every ℓ."""
    p = tree.p
    adj = tree.adjacency
    moved = {v: frozenset(l if l == p + 1 else (l - 1 + steps) % p + 1 for l in tree.labels_at(v)) for v in tree.vertices}
    held = {v: frozenset(tree.labels_at(v)) for v in tree.vertices}

    order: List[int] = []
    queue = deque([ROOT])
    seen = {ROOT}
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                queue.append(w)

    count = 0
    image: Dict[int, int] = {}

    def extend(k: int) -> None:
        nonlocal count
        if k == len(order):
            count += 1
            return
        v = order[k]
        used = set(image.values())
        for w in tree.vertices:
            if w in used or held[w] != moved[v] or len(adj[w]) != len(adj[v]):
                continue
            if any(u in image and image[u] not in adj[w] for u in adj[v]):
                continue
            image[v] = w
            extend(k + 1)
            del image[v]

    extend(0)
    return count


@dataclass(frozen=True)
class NodalWitness:
    """Why (or whether) a multi-vertex tree admits σ.

    ``b`` is the number of X-labels on the vertex of x_1 and ``c`` the number of
    vertices carrying X-labels.  A compatible automorphism forces x_{p+1} to
    sit alone among the X-vertices and every X-vertex to carry b labels, so
    p = b·c and b = 1 or c = 1; either way some vertex has valence < 3.
    """

    tree: DualTree
    b: int
    c: int
    automorphisms: int
    case: str
    detail: str

    @property
    def stable(self) -> bool:
        return self.tree.is_stable()

    @property
    def contradiction(self) -> bool:
        """True iff the tree cannot be a σ-fixed stable curve."""
        return self.automorphisms == 0 or not self.stable

    def to_json(self) -> Dict[str, object]:
        return {
            "splits": self.tree.to_json(),
            "b": self.b,
            "c": self.c,
            "automorphisms": self.automorphisms,
            "case": self.case,
            "detail": self.detail,
        }


def nodal_witness(tree: DualTree) -> NodalWitness:
    if tree.vertex_count == 1:
        raise ValueError("a single-vertex tree is the smooth locus, not a nodal curve")
    p = tree.p
    x_labels = {v: [l for l in tree.labels_at(v) if l <= p] for v in tree.vertices}
    b = len(x_labels[tree.vertex_of(1)])
    carrying = [v for v in tree.vertices if x_labels[v]]
    c = len(carrying)
    automorphisms = compatible_automorphisms(tree)

    if x_labels[ROOT]:
        case = CASE_FIXED_POINT_FREE
        detail = f"x_{p + 1} shares a vertex with {x_labels[ROOT]}, which σ cannot fix"
    elif len({len(x_labels[v]) for v in carrying}) > 1:
        case = CASE_UNEQUAL_LABEL_COUNTS
        detail = f"X-vertices carry {sorted(len(x_labels[v]) for v in carrying)} labels"
    else:
        case = CASE_STABILITY
        low = [v for v in tree.vertices if tree.valence(v) < 3]
        if low:
            name = "root" if low[0] == ROOT else f"vertex {low[0]}"
            detail = f"p = {b}·{c}, {name} has valence {tree.valence(low[0])}"
        else:
            detail = f"p = {b}·{c}, no vertex below valence 3"
    return NodalWitness(tree=tree, b=b, c=c, automorphisms=automorphisms, case=case, detail=detail)


def enumerate_stable_trees(p: int, max_p: Optional[int] = None) -> List[StableTree]:
    """All labelled stable trees with p + 1 marked points, in canonical order."""
    p = require_prime(p)
    limit = get_settings().tree_max_p if max_p is None else max_p
    if p > limit:
        raise ResourceGuardError(f"stable-tree enumeration is limited to p <= {limit}, got {p}")
    labels = range(1, p + 1)
    candidates = [frozenset(c) for size in range(2, p) for c in combinations(labels, size)]

    trees: List[StableTree] = []
    stack: List[Tuple[int, Tuple[FrozenSet[int], ...]]] = [(0, ())]
    while stack:
        start, chosen = stack.pop()
        trees.append(StableTree(p, tuple(tuple(sorted(s)) for s in chosen)))
        for k in range(start, len(candidates)):
            cand = candidates[k]
            if all(_compatible(cand, s) for s in chosen):
                stack.append((k + 1, chosen + (cand,)))

    trees.sort(key=lambda t: (t.vertex_count, t.splits))
    log.info("stable_trees_enumerated", extra={"p": p, "count": len(trees)})
    return trees


def count_by_vertices(trees: Sequence[DualTree]) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for t in trees:
        out[t.vertex_count] = out.get(t.vertex_count, 0) + 1
    return dict(sorted(out.items()))


def nodal_witnesses(p: int, trees: Optional[Sequence[DualTree]] = None) -> List[NodalWitness]:
    """One witness per multi-vertex tree."""
    if trees is None:
        trees = enumerate_stable_trees(p)
    return [nodal_witness(t) for t in trees if t.vertex_count > 1]


def case_counts(witnesses: Sequence[NodalWitness]) -> Dict[str, int]:
    out = {CASE_FIXED_POINT_FREE: 0, CASE_UNEQUAL_LABEL_COUNTS: 0, CASE_STABILITY: 0}
    for w in witnesses:
        out[w.case] += 1
    return out


def nodal_fixed_point_search(
    p: int,
    trees: Optional[Sequence[DualTree]] = None,
    *,
    witnesses: Optional[Sequence[NodalWitness]] = None,
) -> List[NodalWitness]:
    """Witnesses of the multi-vertex trees that do carry a σ-compatible automorphism."""
    if witnesses is None:
        witnesses = nodal_witnesses(p, trees)
    survivors = [w for w in witnesses if w.automorphisms > 0]
    log.info("nodal_fixed_point_search", extra={"p": p, "searched": len(witnesses), "survivors": len(survivors)})
    return survivors


def no_nodal_fixed_points(p: int, witnesses: Optional[Sequence[NodalWitness]] = None) -> bool:
    """True iff no nodal stable curve with p + 1 marked points is fixed by σ."""
    if witnesses is None:
        witnesses = nodal_witnesses(p)
    return all(w.contradiction for w in witnesses)
