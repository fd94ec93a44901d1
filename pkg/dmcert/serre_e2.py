"""E₂ page of the Serre spectral sequence of M̄₀,₁₊ₚ → EZ/p ×_{Z/p} M̄₀,₁₊ₚ → BZ/p.

E₂^{i,j} = H^i(BZ/p; H^j(M̄₀,₁₊ₚ)).  Each fibre degree j is a permutation
module with one fixed monomial and ``cycles(j)`` free orbits, so

    E₂^{0,j} = F_p^{cycles(j)} ⊕ F_p,   E₂^{i,j} = F_p  (i >= 1, j even in range).

The page is stored as dimensions plus labelled generators and the u- and
e-multiplication matrices between neighbouring cells; the certificates below
only ever read those.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .config import get_settings
from .cyclic_cohomology import (
    PermRepresentation,
    decompose_permutation_rep,
    group_cohomology_dims,
    permutation_rep_dims,
)
from .dm_basis import (
    GradedBasis,
    InternalInconsistencyError,
    OrbitDecomposition,
    degree_permutation,
    enumerate_basis,
    fixed_subring_relation,
    orbit_decomposition,
    top_degree,
)
from .fp_linalg import FpMatrix, nullity, rank, require_prime
from .reports import CertificateItem, CertificateReport

log = logging.getLogger("dmcert.serre_e2")

Cell = Tuple[int, int]

COLLAPSE_STATEMENT = (
    "C1-C5 are the computational inputs of the contradiction argument for collapse at E2: "
    "u acts injectively except on p-cycle generators (C1, C2), the total dimension past the "
    "top fibre degree equals the fixed-locus dimension p-1 (C3, C4), and parity rules out the "
    "remaining differentials (C5)."
)
INJECTIVITY_STATEMENT = (
    "I1-I3 are the computational inputs of the injectivity argument for "
    "H*_G(M) -> H*(M) + H*_G(M^fix): the i >= 1 part is v-free (I1), the i = 0 quotient is the "
    "restriction image (I2), and u^k reaches the localization rank p-1 (I3)."
)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


def _power(symbol: str, k: int) -> str:
    if k == 0:
        return ""
    return symbol if k == 1 else f"{symbol}^{k}"


def generator_label(i: int, j: int) -> str:
    """Name of the trivial-summand generator of E₂^{i,j}, e.g. ``eu^2⊗α``."""
    base = ("e" if i % 2 else "") + _power("u", i // 2)
    fibre = _power("α", j // 2) or "1"
    return f"{base or '1'}⊗{fibre}"


def orbit_label(j: int, c: int) -> str:
    return f"x{j}.{c}"


@dataclass(frozen=True)
class E2Page:
    p: int
    max_i: int
    dims: Dict[Cell, int]
    labels: Dict[Cell, Tuple[str, ...]]
    # Indices into labels[(0, j)] of the norm classes of free σ-orbits.
    orbit_classes: Dict[int, Tuple[int, ...]]
    u_mult: Dict[Cell, FpMatrix] = field(default_factory=dict)
    e_mult: Dict[Cell, FpMatrix] = field(default_factory=dict)

    @property
    def top(self) -> int:
        return top_degree(self.p)

    @property
    def fibre_degrees(self) -> List[int]:
        return list(range(0, self.top + 1, 2))

    def _periodic(self, i: int, bound: int) -> int:
        if i <= bound:
            return i
        return i - 2 * ((i - bound + 1) // 2)

    def dim(self, i: int, j: int) -> int:
        if i < 0 or j < 0:
            return 0
        return self.dims.get((self._periodic(i, self.max_i), j), 0)

    def generators(self, i: int, j: int) -> Tuple[str, ...]:
        if i > self.max_i:
            return tuple(generator_label(i, j) for _ in range(self.dim(i, j)))
        return self.labels.get((i, j), ())

    def u_matrix(self, i: int, j: int) -> FpMatrix:
        """u· : E₂^{i,j} -> E₂^{i+2,j}, extended periodically past the display bound."""
        src = self._periodic(i, self.max_i - 2)
        m = self.u_mult.get((src, j))
        if m is None:
            return FpMatrix.zeros(self.dim(i + 2, j), self.dim(i, j), self.p)
        return m

    def e_matrix(self, i: int, j: int) -> FpMatrix:
        src = self._periodic(i, self.max_i - 1)
        m = self.e_mult.get((src, j))
        if m is None:
            return FpMatrix.zeros(self.dim(i + 1, j), self.dim(i, j), self.p)
        return m

    def cycles(self, j: int) -> int:
        return len(self.orbit_classes.get(j, ()))


@dataclass(frozen=True)
class FiltrationModel:
    """dim F^m_k for k = 0..m+1 (F^m_{m+1} = 0) in each total degree m."""

    p: int
    levels: Dict[int, Tuple[int, ...]]

    def dim(self, m: int, k: int) -> int:
        chain = self.levels[m]
        return chain[k] if k < len(chain) else 0

    def quotient(self, m: int, k: int) -> int:
        return self.dim(m, k) - self.dim(m, k + 1)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


def _cell_maps(p: int, i: int, j: int, dims: Dict[Cell, int]) -> Tuple[Optional[FpMatrix], Optional[FpMatrix]]:
    """u and e multiplication out of E₂^{i,j}.

    The trivial summand (index 0) maps isomorphically except e·(e u^k) = 0
    for odd p (e² = u when p = 2); norm classes of free orbits die under both.
    """
    src = dims[(i, j)]

    def hit(target: Cell, acts: bool) -> Optional[FpMatrix]:
        if target not in dims:
            return None
        rows = [[1 if acts and r == 0 and c == 0 else 0 for c in range(src)] for r in range(dims[target])]
        return FpMatrix.from_rows(rows, p, cols=src)

    return hit((i + 2, j), True), hit((i + 1, j), i % 2 == 0 or p == 2)


def assemble_e2(p: int, max_i: Optional[int] = None, basis: Optional[GradedBasis] = None) -> E2Page:
    """Build the page by pushing each graded piece's orbit structure through the two group-cohomology answers."""
    p = require_prime(p)
    if max_i is None:
        max_i = get_settings().display_columns(p)
    if max_i < 4:
        raise ValueError(f"max_i must be >= 4 to exhibit 2-periodicity, got {max_i}")
    if basis is None:
        basis = enumerate_basis(p)
    decomp = orbit_decomposition(basis)

    dims: Dict[Cell, int] = {}
    labels: Dict[Cell, Tuple[str, ...]] = {}
    orbit_classes: Dict[int, Tuple[int, ...]] = {}
    for j in range(0, top_degree(p) + 1, 2):
        piece = basis.piece(j)
        fixed, cycles = decompose_permutation_rep(len(piece), degree_permutation(basis, j), p=p)
        if (fixed, cycles) != (decomp.fixed_count(j), decomp.cycle_count(j)):
            raise InternalInconsistencyError(
                f"degree {j}: permutation gives ({fixed}, {cycles}), orbit listing gives "
                f"({decomp.fixed_count(j)}, {decomp.cycle_count(j)})"
            )
        col = permutation_rep_dims(p, fixed, cycles, max_i)
        for i in range(max_i + 1):
            dims[(i, j)] = col[i]
            if i == 0:
                labels[(i, j)] = tuple([generator_label(0, j)] * fixed) + tuple(
                    orbit_label(j, c) for c in range(1, cycles + 1)
                )
                orbit_classes[j] = tuple(range(fixed, fixed + cycles))
            else:
                labels[(i, j)] = tuple([generator_label(i, j)] * col[i])

    u_mult: Dict[Cell, FpMatrix] = {}
    e_mult: Dict[Cell, FpMatrix] = {}
    for (i, j) in sorted(dims):
        u, e = _cell_maps(p, i, j, dims)
        if u is not None:
            u_mult[(i, j)] = u
        if e is not None:
            e_mult[(i, j)] = e

    page = E2Page(p, max_i, dims, labels, orbit_classes, u_mult, e_mult)
    log.info("e2_assembled", extra={"p": p, "max_i": max_i, "column0": [dims[(0, j)] for j in page.fibre_degrees]})
    return page


# ---------------------------------------------------------------------------
# Page-level checks
# ---------------------------------------------------------------------------


def page_violations(page: E2Page) -> List[str]:
    """Every way ``page`` breaks the shape forced by one fixed monomial per fibre degree."""
    out: List[str] = []
    top = page.top
    for (i, j), d in sorted(page.dims.items()):
        if j % 2 or j > top or j < 0:
            if d:
                out.append(f"E2^{{{i},{j}}} = {d} outside the even range 0..{top}")
            continue
        want = page.cycles(j) + 1 if i == 0 else 1
        if d != want:
            out.append(f"E2^{{{i},{j}}} = {d}, expected {want}")
    for j in page.fibre_degrees:
        for i in range(1, page.max_i - 1):
            u = page.u_matrix(i, j)
            if rank(u) != page.dim(i, j):
                out.append(f"u not injective on E2^{{{i},{j}}}")
        u0 = page.u_matrix(0, j)
        if nullity(u0) != page.cycles(j):
            out.append(f"ker(u) on E2^{{0,{j}}} has dim {nullity(u0)}, expected {page.cycles(j)}")
        if page.p != 2:
            for i in range(0, page.max_i - 1):
                ee = page.e_matrix(i + 1, j) @ page.e_matrix(i, j)
                if not ee.is_zero():
                    out.append(f"e·e != 0 on E2^{{{i},{j}}}")
    return out


def total_dims(page: E2Page, m_lo: int, m_hi: int) -> List[int]:
    """[Σ_{i+j=m} dim E₂^{i,j} for m in m_lo..m_hi]."""
    if m_lo < 0:
        raise ValueError(f"m_lo must be >= 0, got {m_lo}")
    return [sum(page.dim(m - j, j) for j in page.fibre_degrees if j <= m) for m in range(m_lo, m_hi + 1)]


def filtration_model(page: E2Page, m_hi: int) -> FiltrationModel:
    """F^m_k read off the collapsed page: dim F^m_k = Σ_{i >= k} dim E₂^{i, m-i}."""
    levels: Dict[int, Tuple[int, ...]] = {}
    for m in range(0, m_hi + 1):
        chain = [sum(page.dim(i, m - i) for i in range(k, m + 1)) for k in range(m + 2)]
        levels[m] = tuple(chain)
    return FiltrationModel(page.p, levels)


def euler_orbit_check(page: E2Page, decomp: OrbitDecomposition) -> Tuple[int, int]:
    """(Σ_j (-1)^j dim E₂^{0,j}, σ-orbits of the basis counted with sign); equal on a sound page."""
    from_page = sum((-1) ** j * page.dim(0, j) for j in page.fibre_degrees)
    from_orbits = sum((-1) ** j * (decomp.fixed_count(j) + decomp.cycle_count(j)) for j in decomp.degrees)
    return from_page, from_orbits


def _item(item_id: str, ok: bool, detail: str, value: Optional[int] = None) -> CertificateItem:
    if not ok:
        log.warning("certificate_item_failed", extra={"item": item_id, "detail": detail})
    return CertificateItem(id=item_id, passed=ok, detail=detail, value=value)


# ---------------------------------------------------------------------------
# Collapse certificate
# ---------------------------------------------------------------------------


def _c1_u_injective(page: E2Page) -> CertificateItem:
    bad: List[str] = []
    for j in page.fibre_degrees:
        for i in range(1, page.max_i - 1):
            if rank(page.u_matrix(i, j)) != page.dim(i, j):
                bad.append(f"({i},{j})")
        for i in range(1, page.max_i - 1):
            if page.dim(i, j) != page.dim(i + 2, j):
                bad.append(f"period({i},{j})")
    relation = fixed_subring_relation(page.p)
    detail = (
        f"u injective on E2^{{i,j}} for 1 <= i <= {page.max_i - 2}, columns 2-periodic; "
        f"fixed subring generated by {relation['generator']} with vanishing power {relation['vanishing_power']}"
    )
    if bad:
        detail = "u fails at " + ", ".join(bad)
    ok = not bad and bool(relation["holds"])
    return _item("C1", ok, detail)


def _c2_orbit_classes_killed(page: E2Page) -> CertificateItem:
    bad: List[str] = []
    for j in page.fibre_degrees:
        u = page.u_matrix(0, j)
        e = page.e_matrix(0, j)
        for idx in page.orbit_classes.get(j, ()):
            name = page.labels[(0, j)][idx]
            if not u.column(idx).is_zero():
                bad.append(f"{name}·u")
            if not e.column(idx).is_zero():
                bad.append(f"{name}·e")
        if nullity(u) != page.cycles(j):
            bad.append(f"ker u on E2^{{0,{j}}}")
    n = sum(page.cycles(j) for j in page.fibre_degrees)
    detail = f"{n} orbit-class generators, all killed by u and e" if not bad else "survive: " + ", ".join(bad)
    return _item("C2", not bad, detail, n)


def _c3_total_dims(page: E2Page, window: int) -> CertificateItem:
    lo, hi = page.top + 1, page.top + 2 * window
    values = total_dims(page, lo, hi)
    ok = all(v == page.p - 1 for v in values)
    detail = f"total dim for m in [{lo}, {hi}]: {values}"
    return _item("C3", ok, detail, page.p - 1 if ok else None)


def fixed_locus_dims(p: int, hi: int) -> List[int]:
    """dim H^m_G of the p - 1 fixed points, m = 0..hi."""
    return group_cohomology_dims(PermRepresentation.trivial(p, p - 1), hi)


def _c4_fixed_locus(page: E2Page, window: int) -> CertificateItem:
    p = page.p
    lo, hi = page.top + 1, page.top + 2 * window
    fix = fixed_locus_dims(p, hi)[lo:hi + 1]
    totals = total_dims(page, lo, hi)
    ok = all(v == p - 1 for v in fix) and fix == totals
    detail = f"dim H^m_G(p-1 points) for m in [{lo}, {hi}]: {fix}"
    return _item("C4", ok, detail, p - 1 if ok else None)


def _c5_parity(page: E2Page) -> CertificateItem:
    """Enumerate d_r : E_r^{i,j} -> E_r^{i+r, j-r+1} over the display range."""
    excluded = open_pairs = 0
    bad: List[str] = []
    for r in range(2, page.top + 2):
        for j in page.fibre_degrees:
            tj = j - r + 1
            if tj < 0:
                continue
            for i in range(0, page.max_i - r + 1):
                if not page.dim(i, j):
                    continue
                if r % 2 == 0:
                    if page.dim(i + r, tj):
                        bad.append(f"d{r}:({i},{j})")
                    else:
                        excluded += 1
                else:
                    open_pairs += 1
    detail = (
        f"{excluded} even-r differentials land in odd rows and vanish; "
        f"{open_pairs} odd-r pairs are left to the u-module argument"
    )
    if bad:
        detail = "even-r target nonzero at " + ", ".join(bad)
    return _item("C5", not bad, detail, excluded)


def collapse_certificate(p: int, window: int, *, page: Optional[E2Page] = None) -> CertificateReport:
    """Finite facts behind collapse at E₂; ``page`` overrides assembly (negative controls)."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if page is None:
        page = assemble_e2(p)
    elif page.p != p:
        raise ValueError(f"page is for p={page.p}, not {p}")
    items = [
        _c1_u_injective(page),
        _c2_orbit_classes_killed(page),
        _c3_total_dims(page, window),
        _c4_fixed_locus(page, window),
        _c5_parity(page),
    ]
    report = CertificateReport.from_items(page.p, "collapse", COLLAPSE_STATEMENT, items)
    log.info("collapse_certificate", extra={"p": page.p, "window": window, "pass": report.passed})
    return report


# ---------------------------------------------------------------------------
# Injectivity certificate
# ---------------------------------------------------------------------------


def _i1_free_over_v(page: E2Page, window: int) -> CertificateItem:
    bad: List[str] = []
    for j in page.fibre_degrees:
        for i in range(1, page.max_i - 1):
            if rank(page.u_matrix(i, j)) != page.dim(i, j):
                bad.append(f"({i},{j})")
            if page.dim(i, j) != page.dim(i + 2, j):
                bad.append(f"period({i},{j})")
    m = page.top + 2 * window
    free_rank = total_dims(page, m, m)[0]
    ok = not bad and free_rank == page.p - 1
    detail = f"i >= 1 sub-table is v-free, rank {free_rank} in degree {m}"
    if bad:
        detail = "u not injective or not periodic at " + ", ".join(bad)
    return _item("I1", ok, detail, free_rank)


def _i2_filtration(page: E2Page, window: int, basis: GradedBasis) -> CertificateItem:
    hi = page.top + 2 * window
    model = filtration_model(page, hi)
    bad: List[str] = []
    for m in range(hi + 1):
        chain = model.levels[m]
        if any(a < b for a, b in zip(chain, chain[1:])):
            bad.append(f"F^{m} not decreasing")
        if model.dim(m, 1) != sum(page.dim(i, m - i) for i in range(1, m + 1)):
            bad.append(f"F^{m}_1")
        # ρ-image: the σ-invariants of H^m(fibre), computed straight from the permutation.
        piece = basis.piece(m)
        if piece:
            sigma = FpMatrix.permutation(degree_permutation(basis, m), page.p)
            invariants = nullity(sigma - FpMatrix.identity(len(piece), page.p))
        else:
            invariants = 0
        if model.quotient(m, 0) != invariants:
            bad.append(f"F^{m}_0/F^{m}_1 = {model.quotient(m, 0)} vs invariants {invariants}")
    detail = f"F^m_0/F^m_1 equals the σ-invariants of H^m for m <= {hi}"
    if bad:
        detail = "; ".join(bad)
    return _item("I2", not bad, detail)


def _u_power_rank(page: E2Page, i: int, j: int, k: int) -> int:
    acc = FpMatrix.identity(page.dim(i, j), page.p)
    for step in range(k):
        acc = page.u_matrix(i + 2 * step, j) @ acc
    return rank(acc)


def _i3_localization_rank(page: E2Page, window: int) -> CertificateItem:
    p = page.p
    hi = page.top + 2 * window
    fix = fixed_locus_dims(p, hi)
    bad: List[str] = []
    for m in range(hi + 1):
        k = max(1, (page.top - m) // 2 + 1)
        image = sum(_u_power_rank(page, m - j, j, k) for j in page.fibre_degrees if j < m)
        # fixed fibre classes of degree >= m are not reached from i >= 1 yet
        absorbed = sum(page.dim(0, j) - page.cycles(j) for j in page.fibre_degrees if j >= m)
        if image != fix[m] - absorbed:
            bad.append(f"m={m}: rank u^{k} from i >= 1 is {image}, expected {fix[m]} - {absorbed}")
    detail = f"rank of u^k from i >= 1 meets dim H^m_G(p-1 points) less the fixed classes of degree >= m, m <= {hi}"
    if bad:
        detail = "; ".join(bad)
    return _item("I3", not bad, detail, fix[hi] if not bad else None)


def injectivity_certificate(
    p: int,
    window: int,
    *,
    page: Optional[E2Page] = None,
    basis: Optional[GradedBasis] = None,
) -> CertificateReport:
    """Finite facts behind injectivity of ρ ⊕ i*.

    I1-I3 are evaluated even when the collapse precondition fails; that
    outcome is recorded as its own item.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if basis is None:
        basis = enumerate_basis(page.p if page is not None else require_prime(p))
    if page is None:
        page = assemble_e2(p, basis=basis)
    collapse = collapse_certificate(page.p, window, page=page)
    items = [
        _item(
            "collapse",
            collapse.passed,
            "collapse certificate passes" if collapse.passed else "collapse fails: " + ", ".join(collapse.failed_ids()),
        ),
        _i1_free_over_v(page, window),
        _i2_filtration(page, window, basis),
        _i3_localization_rank(page, window),
    ]
    report = CertificateReport.from_items(page.p, "injectivity", INJECTIVITY_STATEMENT, items)
    log.info("injectivity_certificate", extra={"p": page.p, "window": window, "pass": report.passed})
    return report
