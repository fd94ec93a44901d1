"""JSON, CSV and ASCII output from the report models in :mod:`dmcert.reports`."""
from __future__ import annotations

import csv
import io
import json
from functools import singledispatch
from typing import Dict, List, Sequence, Tuple

from pydantic import BaseModel

from .reports import (
    BasisTable,
    BorelTable,
    CertificateReport,
    E2Table,
    FixedPointsTable,
    GroupCohomologyTable,
    MoebiusDegreeTable,
    OrbitTable,
    TreeTable,
    VerifyAllReport,
)

Rows = Tuple[List[str], List[List[object]]]


def to_json(model: BaseModel) -> str:
    payload = model.model_dump(mode="json", by_alias=True, exclude_none=True)
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Tabular views
# ---------------------------------------------------------------------------


def _by_degree(degrees: Dict[str, int]) -> List[Tuple[int, int]]:
    return sorted((int(k), v) for k, v in degrees.items())


@singledispatch
def table_rows(model: BaseModel) -> Rows:
    raise TypeError(f"no tabular view for {type(model).__name__}")


@table_rows.register
def _(model: BasisTable) -> Rows:
    if model.oracle is None:
        return ["degree", "dim"], [[d, n] for d, n in _by_degree(model.degrees)]
    oracle = dict(_by_degree(model.oracle))
    return ["degree", "dim", "oracle"], [[d, n, oracle.get(d, 0)] for d, n in _by_degree(model.degrees)]


@table_rows.register
def _(model: OrbitTable) -> Rows:
    fixed: Dict[int, int] = {}
    cycles: Dict[int, int] = {}
    for mono in model.fixed:
        deg = 2 * sum(t.exp for t in mono)
        fixed[deg] = fixed.get(deg, 0) + 1
    for orbit in model.cycles:
        deg = 2 * sum(t.exp for t in orbit[0])
        cycles[deg] = cycles.get(deg, 0) + 1
    return ["degree", "dim", "fixed", "cycles"], [
        [d, n, fixed.get(d, 0), cycles.get(d, 0)] for d, n in _by_degree(model.degrees)
    ]


@table_rows.register
def _(model: GroupCohomologyTable) -> Rows:
    return ["i", "dim"], [[i, d] for i, d in enumerate(model.dims)]


@table_rows.register
def _(model: E2Table) -> Rows:
    return ["i", "j", "dim", "generators"], [[c.i, c.j, c.dim, " ".join(c.generators)] for c in model.cells]


@table_rows.register
def _(model: CertificateReport) -> Rows:
    rows: List[List[object]] = [[it.id, str(it.passed).lower(), it.detail] for it in model.items]
    rows.append(["overall", str(model.passed).lower(), model.certificate])
    return ["id", "pass", "detail"], rows


@table_rows.register
def _(model: VerifyAllReport) -> Rows:
    header = ["stage", "pass", "value", "detail"]
    timed = any(s.seconds is not None for s in model.stages)
    if timed:
        header.append("seconds")
    rows: List[List[object]] = []
    for s in model.stages:
        row: List[object] = [s.name, str(s.passed).lower(), "" if s.value is None else s.value, s.detail]
        if timed:
            row.append("" if s.seconds is None else f"{s.seconds:.3f}")
        rows.append(row)
    return header, rows


@table_rows.register
def _(model: FixedPointsTable) -> Rows:
    rows: List[List[object]] = []
    for cfg in model.configurations:
        for label, (z, w) in enumerate(cfg.points, start=1):
            rows.append(["" if cfg.s is None else cfg.s, label, " ".join(z), " ".join(w)])
    return ["s", "label", "z", "w"], rows


@table_rows.register
def _(model: TreeTable) -> Rows:
    return ["vertices", "count"], [[int(k), v] for k, v in sorted(model.by_vertices.items(), key=lambda kv: int(kv[0]))]


@table_rows.register
def _(model: MoebiusDegreeTable) -> Rows:
    return ["power", "coefficient"], [[k, " ".join(c)] for k, c in enumerate(model.denominator)]


@table_rows.register
def _(model: BorelTable) -> Rows:
    return ["degree", "dim"], [[n, d] for n, d in enumerate(model.dims)]


def to_csv(model: BaseModel) -> str:
    header, rows = table_rows(model)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# ASCII
# ---------------------------------------------------------------------------


def _aligned(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    cells = [[str(x) for x in header]] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _cell_text(generators: Sequence[str]) -> str:
    if not generators:
        return "."
    if len(generators) == 1:
        return generators[0]
    return f"{generators[0]}+{len(generators) - 1}x"


def e2_ascii(model: E2Table) -> str:
    """First-quadrant grid: j grows upward, i to the right."""
    cells = {(c.i, c.j): c for c in model.cells}
    columns = list(range(model.max_i + 1))
    rows: List[List[str]] = []
    for j in range(model.top_degree, -1, -1):
        row = [f"j={j}"]
        for i in columns:
            c = cells.get((i, j))
            row.append(_cell_text(c.generators) if c else ".")
        rows.append(row)
    header = ["p=" + str(model.p)] + [f"i={i}" for i in columns]
    out = _aligned(header, rows)
    killed = [(c.j, g) for c in model.cells if c.i == 0 for g in c.killed_by_u_and_e]
    if killed:
        out += "\nkilled by u and e:\n"
        for j, g in killed:
            out += f"  E2^{{0,{j}}}  {g}\n"
    return out


def to_ascii(model: BaseModel) -> str:
    if isinstance(model, E2Table):
        return e2_ascii(model)
    header, rows = table_rows(model)
    return _aligned(header, rows)


def render(model: BaseModel, fmt: str) -> str:
    if fmt == "json":
        return to_json(model)
    if fmt == "csv":
        return to_csv(model)
    if fmt == "ascii":
        return to_ascii(model)
    raise ValueError(f"unknown format {fmt!r}")
