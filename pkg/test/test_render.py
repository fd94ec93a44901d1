from __future__ import annotations

import json

import pytest
from pydantic import ValidationError

from dmcert.render import render, table_rows
from dmcert.reports import (
    BasisTable,
    BorelTable,
    CertificateItem,
    CertificateReport,
    E2Cell,
    E2Table,
    RunConfig,
    StageResult,
    VerifyAllReport,
)


def _report(*passes: bool) -> CertificateReport:
    items = [CertificateItem(id=f"C{k + 1}", passed=ok, detail=f"item {k + 1}") for k, ok in enumerate(passes)]
    return CertificateReport.from_items(3, "collapse", "E2 = E_inf", items)


def test_json_is_compact_sorted_and_aliased():
    text = render(_report(True, False), "json")
    assert text.endswith("}\n")
    assert " " not in text.replace("E2 = E_inf", "").replace("item 1", "").replace("item 2", "")
    payload = json.loads(text)
    assert list(payload) == sorted(payload)
    assert payload["pass"] is False
    assert payload["items"][0] == {"detail": "item 1", "id": "C1", "pass": True}


def test_report_helpers():
    report = _report(True, False, False)
    assert report.failed_ids() == ["C2", "C3"]
    assert report.item("C1").passed
    with pytest.raises(KeyError):
        report.item("C9")


def test_certificate_csv_ends_with_overall_row():
    lines = render(_report(True, True), "csv").splitlines()
    assert lines == ["id,pass,detail", "C1,true,item 1", "C2,true,item 2", "overall,true,collapse"]


def test_basis_csv_with_oracle_column():
    table = BasisTable(p=4, degrees={"0": 1, "2": 5, "4": 1}, oracle={"0": 1, "2": 5, "4": 1}, matches_oracle=True)
    assert render(table, "csv") == "degree,dim,oracle\n0,1,1\n2,5,5\n4,1,1\n"


def test_ascii_table_is_aligned():
    text = render(BorelTable(p=3, max_degree=2, dims=[1, 0, 10]), "ascii")
    assert text.splitlines() == ["degree  dim", "------  ---", "0       1", "1       0", "2       10"]


def _e2(killed):
    cells = [
        E2Cell(i=0, j=0, dim=1, generators=["1⊗1"]),
        E2Cell(i=1, j=0, dim=1, generators=["e⊗1"]),
        E2Cell(i=0, j=2, dim=3, generators=["1⊗α", "x2.1", "x2.2"], killed_by_u_and_e=killed),
    ]
    return E2Table(p=5, max_i=1, top_degree=2, cells=cells, total_dims=[1, 1, 3])


def test_e2_ascii_grid_and_legend():
    lines = render(_e2(["x2.1", "x2.2"]), "ascii").splitlines()
    assert lines[0].split() == ["p=5", "i=0", "i=1"]
    assert lines[2].split() == ["j=2", "1⊗α+2x", "."]
    assert lines[4].split() == ["j=0", "1⊗1", "e⊗1"]
    assert "killed by u and e:" in lines
    assert "  E2^{0,2}  x2.2" in lines


def test_e2_ascii_without_orbit_classes_has_no_legend():
    assert "killed by u and e" not in render(_e2([]), "ascii")


def test_verify_report_seconds_column_only_when_timed():
    plain = VerifyAllReport(p=3, window=2, stages=[StageResult(name="basis", passed=True, detail="ok", value=2)], passed=True)
    assert render(plain, "csv").splitlines()[0] == "stage,pass,value,detail"
    assert "seconds" not in render(plain, "json")
    timed = VerifyAllReport(
        p=3, window=2, stages=[StageResult(name="basis", passed=True, detail="ok", seconds=0.25)], passed=True
    )
    assert render(timed, "csv").splitlines() == ["stage,pass,value,detail,seconds", "basis,true,,ok,0.250"]


def test_verify_report_pass_must_be_conjunction():
    stages = [StageResult(name="basis", passed=True, detail=""), StageResult(name="e2", passed=False, detail="")]
    with pytest.raises(ValidationError):
        VerifyAllReport(p=3, window=2, stages=stages, passed=True)
    report = VerifyAllReport.model_validate({"p": 3, "window": 2, "stages": [], "pass": True})
    assert report.passed
    with pytest.raises(KeyError):
        report.stage("basis")


def test_unknown_format_and_missing_view():
    with pytest.raises(ValueError):
        render(_report(True), "xml")
    with pytest.raises(TypeError):
        table_rows(RunConfig(subcommand="betti"))


@pytest.mark.parametrize(
    "fields",
    [{"p": 4}, {"p": 1}, {"format": "xml"}, {"window": 0}, {"max_i": -1}, {"max_degree": -2}, {"n": 1}],
)
def test_run_config_rejects(fields):
    with pytest.raises(ValidationError):
        RunConfig(subcommand="betti", **fields)


def test_run_config_is_frozen():
    assert RunConfig(subcommand="group-cohomology", p=3, max_i=0).max_i == 0
    config = RunConfig(subcommand="e2", p=7)
    assert config.format == "json" and config.rep == "trivial"
    with pytest.raises(ValidationError):
        config.p = 5  # type: ignore[misc]
