from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ValidationError

from .config import get_settings
from .cyclic_cohomology import PermRepresentation, group_cohomology_dims, parse_cycle_notation
from .dm_basis import Monomial, enumerate_basis, orbit_decomposition
from .equivariant_cochains import FiniteGComplex, borel_cohomology_dims, build_borel
from .fixed_points import enumerate_fixed, moebius_power_degree, solve_fixed_moebius
from .keel import betti_oracle
from .logging import log_context, setup_logging
from .render import render
from .reports import (
    BasisTable,
    BorelTable,
    ConfigTable,
    E2Cell,
    E2Table,
    FixedPointsTable,
    GroupCohomologyTable,
    MoebiusDegreeTable,
    MonomialTerm,
    NodalWitnessRow,
    OrbitTable,
    RunConfig,
    TreeTable,
)
from .serre_e2 import assemble_e2, collapse_certificate, injectivity_certificate, total_dims
from .stable_trees import (
    case_counts,
    count_by_vertices,
    enumerate_stable_trees,
    no_nodal_fixed_points,
    nodal_fixed_point_search,
    nodal_witnesses,
)
from .verify import verify_all

log = logging.getLogger("dmcert")

EXIT_OK = 0
EXIT_CERTIFICATE_FAILED = 1
EXIT_USAGE = 2

Handler = Callable[[RunConfig], Tuple[int, BaseModel]]


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------


def _require_p(config: RunConfig) -> int:
    if config.p is None:
        raise ValueError(f"{config.subcommand} needs --p")
    return config.p


def _degrees(dims: Dict[int, int]) -> Dict[str, int]:
    return {str(d): n for d, n in sorted(dims.items())}


def _betti(config: RunConfig) -> Tuple[int, BaseModel]:
    if config.n is not None and config.p is not None:
        raise ValueError("pass either --p or --n, not both")
    labels = config.n if config.n is not None else _require_p(config)
    basis = enumerate_basis(labels, config.max_degree)
    table = BasisTable(p=labels, degrees=_degrees(basis.dims()))
    if not config.check:
        return EXIT_OK, table
    oracle = {d: n for d, n in betti_oracle(labels).items() if n and (config.max_degree is None or d <= config.max_degree)}
    matches = basis.dims() == oracle
    table = table.model_copy(update={"oracle": _degrees(oracle), "matches_oracle": matches})
    return (EXIT_OK if matches else EXIT_CERTIFICATE_FAILED), table


def _orbits(config: RunConfig) -> Tuple[int, BaseModel]:
    basis = enumerate_basis(_require_p(config))
    decomp = orbit_decomposition(basis)

    def terms(m: Monomial) -> List[MonomialTerm]:
        return [MonomialTerm(set=list(s.members), exp=d) for s, d in m.factors]

    return EXIT_OK, OrbitTable(
        p=basis.p,
        degrees=_degrees(basis.dims()),
        fixed=[terms(m) for m in decomp.fixed],
        cycles=[[terms(m) for m in orbit] for orbit in decomp.cycles],
    )


def _representation(p: int, text: str) -> PermRepresentation:
    if text == "trivial":
        return PermRepresentation.trivial(p)
    if text == "regular":
        return PermRepresentation.regular(p)
    if text.startswith("perm:"):
        return PermRepresentation.from_permutation(p, parse_cycle_notation(text[len("perm:"):]))
    raise ValueError(f"--rep must be trivial, regular or perm:<cycles>, got {text!r}")


def _group_cohomology(config: RunConfig) -> Tuple[int, BaseModel]:
    p = _require_p(config)
    rep = _representation(p, config.rep)
    dims = group_cohomology_dims(rep, config.max_i)
    return EXIT_OK, GroupCohomologyTable(p=p, rep=config.rep, dimension=rep.dimension, dims=dims)


def _e2(config: RunConfig) -> Tuple[int, BaseModel]:
    p = _require_p(config)
    page = assemble_e2(p, config.max_i)
    cells: List[E2Cell] = []
    for (i, j) in sorted(page.dims, key=lambda c: (c[1], c[0])):
        gens = page.generators(i, j)
        killed = [gens[k] for k in page.orbit_classes.get(j, ())] if i == 0 else []
        cells.append(E2Cell(i=i, j=j, dim=page.dims[(i, j)], generators=list(gens), killed_by_u_and_e=killed))
    return EXIT_OK, E2Table(
        p=p,
        max_i=page.max_i,
        top_degree=page.top,
        cells=cells,
        total_dims=total_dims(page, 0, page.max_i + page.top),
    )


def _window(config: RunConfig) -> int:
    return config.window if config.window is not None else get_settings().default_window


def _collapse(config: RunConfig) -> Tuple[int, BaseModel]:
    report = collapse_certificate(_require_p(config), _window(config))
    return (EXIT_OK if report.passed else EXIT_CERTIFICATE_FAILED), report


def _inject(config: RunConfig) -> Tuple[int, BaseModel]:
    report = injectivity_certificate(_require_p(config), _window(config))
    return (EXIT_OK if report.passed else EXIT_CERTIFICATE_FAILED), report


def _fixed_points(config: RunConfig) -> Tuple[int, BaseModel]:
    p = _require_p(config)
    configs = enumerate_fixed(p)
    table = FixedPointsTable(
        p=p,
        count=len(configs),
        configurations=[ConfigTable(s=c.s, points=c.to_json()) for c in configs],
        # enumerate_fixed raises instead of returning unverified configurations.
        sigma_fixed=True,
        pairwise_distinct=True,
        power_map_checked=True,
    )
    return (EXIT_OK if len(configs) == p - 1 else EXIT_CERTIFICATE_FAILED), table


def _trees(config: RunConfig) -> Tuple[int, BaseModel]:
    p = _require_p(config)
    trees = enumerate_stable_trees(p)
    witnesses = nodal_witnesses(p, trees)
    none_fixed = no_nodal_fixed_points(p, witnesses)
    table = TreeTable(
        p=p,
        count=len(trees),
        by_vertices={str(k): v for k, v in count_by_vertices(trees).items()},
        trees=[t.to_json() for t in trees],
        cases=case_counts(witnesses),
        survivors=[NodalWitnessRow(**w.to_json()) for w in nodal_fixed_point_search(p, witnesses=witnesses)],
        witnesses=[NodalWitnessRow(**w.to_json()) for w in witnesses],
        no_nodal_fixed_points=none_fixed,
    )
    return (EXIT_OK if none_fixed else EXIT_CERTIFICATE_FAILED), table


def _moebius_degree(config: RunConfig) -> Tuple[int, BaseModel]:
    p = _require_p(config)
    report = moebius_power_degree(p)
    solved = solve_fixed_moebius(p)
    table = MoebiusDegreeTable(
        p=p,
        numerator_c_free=bool(report["numerator_c_free"]),
        denominator_degree=int(report["denominator_degree"]),  # type: ignore[arg-type]
        denominator=report["denominator"].to_json(),  # type: ignore[union-attr]
        rotation_at_c_zero=bool(report["rotation_at_c_zero"]),
        roots_checked=int(solved["roots"]),  # type: ignore[arg-type]
        roots_match_fixed=bool(solved["holds"]),
    )
    ok = bool(report["holds"]) and bool(solved["holds"])
    return (EXIT_OK if ok else EXIT_CERTIFICATE_FAILED), table


def _borel(config: RunConfig) -> Tuple[int, BaseModel]:
    if config.input is None:
        raise ValueError("borel needs --input complex.json")
    try:
        text = Path(config.input).read_text(encoding="utf-8")
    except OSError as e:
        raise ValueError(f"cannot read {config.input}: {e}") from e
    complex_ = FiniteGComplex.from_json(text)
    if config.p is not None and config.p != complex_.p:
        raise ValueError(f"--p {config.p} disagrees with p={complex_.p} in {config.input}")
    max_degree = config.max_degree if config.max_degree is not None else 2 * complex_.p + 2
    dims = borel_cohomology_dims(build_borel(complex_, max_degree + 2))
    return EXIT_OK, BorelTable(p=complex_.p, max_degree=max_degree, dims=dims)


def _verify_all(config: RunConfig) -> Tuple[int, BaseModel]:
    report = verify_all(_require_p(config), config.window, timings=config.timings)
    return (EXIT_OK if report.passed else EXIT_CERTIFICATE_FAILED), report


HANDLERS: Dict[str, Handler] = {
    "betti": _betti,
    "orbits": _orbits,
    "group-cohomology": _group_cohomology,
    "e2": _e2,
    "collapse": _collapse,
    "inject": _inject,
    "fixed-points": _fixed_points,
    "trees": _trees,
    "moebius-degree": _moebius_degree,
    "borel": _borel,
    "verify-all": _verify_all,
}


def run(config: RunConfig) -> Tuple[int, str]:
    """Dispatch ``config`` and serialize the result; ValueError means a usage error."""
    code, model = HANDLERS[config.subcommand](config)
    return code, render(model, config.format)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="the prime p (number of permuted labels)")
    common.add_argument("--format", choices=("json", "csv", "ascii"), default="json")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="dmcert",
        description="Mod-p cohomology of M̄_{0,1+p} with its Z/p action, and certificates.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    betti = sub.add_parser("betti", parents=[common], help="Betti numbers from the monomial basis")
    betti.add_argument("--n", type=int, default=None, help="number of labels; composite values allowed")
    betti.add_argument("--max-degree", type=int, default=None)
    betti.add_argument("--check", action="store_true", help="compare with Keel's recursion")

    sub.add_parser("orbits", parents=[common], help="σ-orbits of the basis")

    gc = sub.add_parser("group-cohomology", parents=[common], help="H^i(BZ/p; A)")
    gc.add_argument("--rep", default="trivial", help="trivial | regular | perm:<cycle notation>")
    gc.add_argument("--max-i", type=int, default=None)

    e2 = sub.add_parser("e2", parents=[common], help="the Serre E2 page")
    e2.add_argument("--max-i", type=int, default=None)

    for name, text in (("collapse", "collapse certificate"), ("inject", "injectivity certificate")):
        cert = sub.add_parser(name, parents=[common], help=text)
        cert.add_argument("--window", type=int, default=None)

    sub.add_parser("fixed-points", parents=[common], help="the p-1 fixed configurations")
    sub.add_parser("trees", parents=[common], help="stable trees and the nodal fixed-point search")
    sub.add_parser("moebius-degree", parents=[common], help="degree of the Möbius-power denominator")

    borel = sub.add_parser("borel", parents=[common], help="Borel cohomology of a finite Z/p-complex")
    borel.add_argument("--input", required=True)
    borel.add_argument("--max-degree", type=int, default=None)

    verify = sub.add_parser("verify-all", parents=[common], help="run every stage")
    verify.add_argument("--window", type=int, default=None)
    verify.add_argument("--timings", action="store_true", help="include per-stage seconds in the output")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if v is not None and k in RunConfig.model_fields}
    return RunConfig(**fields)


def validation_message(e: ValidationError) -> str:
    """One line per failed field, without pydantic's banner and URLs."""
    parts = []
    for err in e.errors():
        msg = err["msg"]
        if msg.startswith("Value error, "):
            parts.append(msg[len("Value error, "):])
        else:
            field = ".".join(str(x) for x in err["loc"])
            parts.append(f"{field}: {msg}" if field else msg)
    return "; ".join(parts)


def _usage_error(message: str) -> int:
    log.warning("usage_error", extra={"error": message})
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    setup_logging(settings.log_level)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = config_from_args(args)
    except ValidationError as e:
        with log_context(subcommand=args.subcommand):
            return _usage_error(validation_message(e))

    with log_context(subcommand=config.subcommand, p=config.p):
        try:
            code, text = run(config)
        except ValidationError as e:
            return _usage_error(validation_message(e))
        except ValueError as e:
            return _usage_error(str(e))
        except RuntimeError as e:
            log.error("internal_check_failed", extra={"error": str(e)})
            print(f"internal check failed: {e}", file=sys.stderr)
            return EXIT_CERTIFICATE_FAILED

        if config.out:
            Path(config.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        log.info("command_done", extra={"exit_code": code})
    return code
