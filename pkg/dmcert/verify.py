"""The one-shot pipeline behind ``verify-all``.

Stages run in order, each consuming what the previous ones built.  A stage
never raises: failures (including unexpected internal errors) become a
failed :class:`StageResult`.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .config import get_settings
from .cyclic_cohomology import (
    PermRepresentation,
    certify_regular_vanishing,
    default_max_i,
    group_cohomology_dims,
    permutation_rep_dims,
)
from .dm_basis import (
    GradedBasis,
    OrbitDecomposition,
    enumerate_basis,
    fixed_subring_relation,
    orbit_decomposition,
    poincare_symmetric,
)
from .equivariant_cochains import (
    FiniteGComplex,
    borel_cohomology_dims,
    build_borel,
    fixed_point_restriction,
    localization_check,
    stabilized_dims,
)
from .fixed_points import enumerate_fixed, moebius_power_degree, solve_fixed_moebius
from .fp_linalg import require_prime
from .keel import betti_oracle
from .logging import log_context
from .reports import StageResult, VerifyAllReport
from .serre_e2 import (
    E2Page,
    assemble_e2,
    collapse_certificate,
    euler_orbit_check,
    injectivity_certificate,
    page_violations,
)
from .stable_trees import case_counts, no_nodal_fixed_points, nodal_fixed_point_search, nodal_witnesses

log = logging.getLogger("dmcert.verify")

StageOutcome = Tuple[bool, str, Optional[int]]


@dataclass
class _Context:
    p: int
    window: int
    basis: Optional[GradedBasis] = None
    decomp: Optional[OrbitDecomposition] = None
    page: Optional[E2Page] = None
    fixed_configs: Optional[int] = None
    timings: Dict[str, float] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def _stage_basis(ctx: _Context) -> StageOutcome:
    ctx.basis = enumerate_basis(ctx.p)
    dims = ctx.basis.dims()
    oracle = {d: n for d, n in betti_oracle(ctx.p).items() if n}
    ok = dims == oracle and poincare_symmetric(ctx.basis)
    return ok, f"dims {list(dims.values())} vs Keel {list(oracle.values())}", ctx.basis.total


def _stage_orbits(ctx: _Context) -> StageOutcome:
    assert ctx.basis is not None
    ctx.decomp = orbit_decomposition(ctx.basis)
    fixed = len(ctx.decomp.fixed)
    relation = fixed_subring_relation(ctx.p)
    ok = fixed == ctx.p - 1 and ctx.decomp.total == ctx.basis.total and bool(relation["holds"])
    return ok, f"{fixed} fixed, {len(ctx.decomp.cycles)} cycles of size {ctx.p}", fixed


def _stage_group_cohomology(ctx: _Context) -> StageOutcome:
    p = ctx.p
    max_i = default_max_i(p)
    trivial = group_cohomology_dims(PermRepresentation.trivial(p), max_i)
    regular = group_cohomology_dims(PermRepresentation.regular(p), max_i)
    mixed = PermRepresentation.trivial(p).direct_sum(PermRepresentation.regular(p))
    borel_point = borel_cohomology_dims(build_borel(FiniteGComplex.point(p), max_i + 2))
    borel_free = borel_cohomology_dims(build_borel(FiniteGComplex.free_orbit(p), max_i + 2))
    borel_mixed = borel_cohomology_dims(build_borel(FiniteGComplex.from_rep(mixed), max_i + 2))
    checked, failed = certify_regular_vanishing(p, max_i)
    ok = (
        trivial == [1] * (max_i + 1)
        and regular == [1] + [0] * max_i
        and borel_point == trivial
        and borel_free == regular
        and borel_mixed == group_cohomology_dims(mixed, max_i) == permutation_rep_dims(p, 1, 1, max_i)
        and not failed
    )
    detail = f"trivial, regular and their sum agree with the Borel complex through degree {max_i}"
    detail += f", {checked} regular cocycles bounded by explicit witnesses"
    if failed:
        detail += f", witness fails in degrees {failed}"
    return ok, detail, max_i


def _stage_e2(ctx: _Context) -> StageOutcome:
    assert ctx.basis is not None and ctx.decomp is not None
    ctx.page = assemble_e2(ctx.p, basis=ctx.basis)
    problems = page_violations(ctx.page)
    from_page, from_orbits = euler_orbit_check(ctx.page, ctx.decomp)
    ok = not problems and from_page == from_orbits
    detail = f"column 0 euler {from_page} = orbit count {from_orbits}" if ok else "; ".join(problems) or "euler mismatch"
    return ok, detail, from_page


def _stage_collapse(ctx: _Context) -> StageOutcome:
    assert ctx.page is not None
    report = collapse_certificate(ctx.p, ctx.window, page=ctx.page)
    detail = "C1-C5 pass" if report.passed else "failed: " + ", ".join(report.failed_ids())
    return report.passed, detail, report.item("C3").value


def _stage_inject(ctx: _Context) -> StageOutcome:
    assert ctx.page is not None and ctx.basis is not None
    report = injectivity_certificate(ctx.p, ctx.window, page=ctx.page, basis=ctx.basis)
    detail = "I1-I3 pass" if report.passed else "failed: " + ", ".join(report.failed_ids())
    return report.passed, detail, report.item("I1").value


def _stage_fixed_points(ctx: _Context) -> StageOutcome:
    p = ctx.p
    if p == 2:
        ctx.fixed_configs = 1
        return True, "M̄₀,₃ is a single point", 1
    configs = enumerate_fixed(p)
    ctx.fixed_configs = len(configs)
    degree = moebius_power_degree(p)
    solved = solve_fixed_moebius(p)
    parts = [f"{len(configs)} configurations", f"denominator degree {degree['denominator_degree']}"]
    ok = len(configs) == p - 1 and bool(degree["holds"]) and bool(solved["holds"])
    if p <= get_settings().tree_max_p:
        witnesses = nodal_witnesses(p)
        survivors = nodal_fixed_point_search(p, witnesses=witnesses)
        nodal = no_nodal_fixed_points(p, witnesses)
        ok = ok and nodal
        cases = " ".join(f"{k}={v}" for k, v in case_counts(witnesses).items())
        parts.append(f"{len(witnesses)} nodal trees ({cases}), {len(survivors)} admit σ")
        parts.append("no nodal fixed points" if nodal else "nodal fixed point found")
    else:
        parts.append(f"tree search skipped above p={get_settings().tree_max_p}")
    return ok, ", ".join(parts), len(configs)


def _localization_dim(p: int, window: int) -> int:
    dims = stabilized_dims(FiniteGComplex.fixed_points(p, p - 1), window)
    return dims[0] if len(set(dims)) == 1 else -1


def _stage_cross_count(ctx: _Context) -> StageOutcome:
    assert ctx.decomp is not None
    window = get_settings().localization_window
    counts = {
        "fixed basis monomials": len(ctx.decomp.fixed),
        "fixed configurations": ctx.fixed_configs if ctx.fixed_configs is not None else -1,
        "stabilized Borel dim": _localization_dim(ctx.p, window),
    }
    ok = all(v == ctx.p - 1 for v in counts.values())
    return ok, ", ".join(f"{k} {v}" for k, v in counts.items()), ctx.p - 1 if ok else None


def _stage_localization(ctx: _Context) -> StageOutcome:
    p = ctx.p
    window = get_settings().localization_window
    checks: List[Tuple[str, bool]] = []

    mixed = FiniteGComplex.free_orbit(p).disjoint_union(FiniteGComplex.point(p))
    sub, restriction = fixed_point_restriction(mixed)
    checks.append(("free orbit + point", localization_check(mixed, sub, restriction, window)))

    free = FiniteGComplex.free_orbit(p)
    sub, restriction = fixed_point_restriction(free)
    checks.append(("free orbit", localization_check(free, sub, restriction, window)))

    many = FiniteGComplex.fixed_points(p, p - 1).disjoint_union(FiniteGComplex.free_orbit(p))
    sub, restriction = fixed_point_restriction(many)
    checks.append(("p-1 points + free orbit", localization_check(many, sub, restriction, window)))

    ok = all(passed for _, passed in checks)
    detail = ", ".join(f"{name}: {'ok' if passed else 'FAIL'}" for name, passed in checks)
    return ok, detail, len(checks)


STAGES: List[Tuple[str, Callable[[_Context], StageOutcome]]] = [
    ("basis", _stage_basis),
    ("orbits", _stage_orbits),
    ("group_cohomology", _stage_group_cohomology),
    ("e2", _stage_e2),
    ("collapse", _stage_collapse),
    ("inject", _stage_inject),
    ("fixed_points", _stage_fixed_points),
    ("cross_count", _stage_cross_count),
    ("localization", _stage_localization),
]


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------


def verify_all(p: int, window: Optional[int] = None, *, timings: bool = False) -> VerifyAllReport:
    """Run every stage; wall-clock timings are logged and only reported when ``timings`` is set."""
    p = require_prime(p)
    if window is None:
        window = get_settings().default_window
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    ctx = _Context(p, window)
    results: List[StageResult] = []
    for name, stage in STAGES:
        started = time.perf_counter()
        with log_context(p=p, stage=name):
            try:
                ok, detail, value = stage(ctx)
            except (RuntimeError, ValueError, ArithmeticError, AssertionError) as e:
                log.error("verify_stage_crashed", extra={"error": str(e)})
                ok, detail, value = False, f"{type(e).__name__}: {e}", None
            elapsed = time.perf_counter() - started
            ctx.timings[name] = elapsed
            log.info("verify_stage_done", extra={"pass": ok, "seconds": round(elapsed, 3)})
        results.append(
            StageResult(name=name, passed=ok, detail=detail, value=value, seconds=round(elapsed, 3) if timings else None)
        )

    passed = all(r.passed for r in results)
    cross = results[[n for n, _ in STAGES].index("cross_count")].value
    return VerifyAllReport(p=p, window=window, stages=results, passed=passed, cross_count=cross)
