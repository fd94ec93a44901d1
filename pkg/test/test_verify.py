from __future__ import annotations

from dataclasses import replace

import pytest

from dmcert import verify
from dmcert.fp_linalg import InvalidPrimeError
from dmcert.stable_trees import DualTree, StableTree, nodal_witness
from dmcert.verify import STAGES, verify_all

STAGE_NAMES = ["basis", "orbits", "group_cohomology", "e2", "collapse", "inject", "fixed_points", "cross_count", "localization"]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_verify_all_passes(p):
    report = verify_all(p, 3)
    assert [s.name for s in report.stages] == STAGE_NAMES
    assert report.passed, [(s.name, s.detail) for s in report.stages if not s.passed]
    assert report.cross_count == p - 1
    assert report.stage("orbits").value == p - 1


@pytest.mark.slow
def test_verify_all_p7():
    report = verify_all(7)
    assert report.passed
    assert report.cross_count == 6
    assert report.stage("basis").value == 1630


def test_p2_fixed_point_stage_is_degenerate():
    report = verify_all(2, 2)
    stage = report.stage("fixed_points")
    assert stage.passed and stage.value == 1
    assert "single point" in stage.detail


def test_timings_only_on_request():
    assert all(s.seconds is None for s in verify_all(3, 2).stages)
    timed = verify_all(3, 2, timings=True)
    assert all(s.seconds is not None and s.seconds >= 0 for s in timed.stages)


def test_window_defaults_from_settings(monkeypatch):
    monkeypatch.setenv("DMCERT_WINDOW", "2")
    assert verify_all(3).window == 2


def test_bad_arguments():
    with pytest.raises(InvalidPrimeError):
        verify_all(9)
    with pytest.raises(ValueError):
        verify_all(3, 0)


def test_crashing_stage_is_reported_not_raised(monkeypatch):
    def broken(ctx):
        raise RuntimeError("boom")

    patched = [(name, broken if name == "e2" else fn) for name, fn in STAGES]
    monkeypatch.setattr(verify, "STAGES", patched)
    report = verify_all(3, 2)
    assert not report.passed
    e2 = report.stage("e2")
    assert not e2.passed and e2.detail == "RuntimeError: boom"
    # later stages that need the page fail too, earlier ones are untouched
    assert report.stage("basis").passed
    assert not report.stage("collapse").passed


def test_cross_count_mismatch_fails(monkeypatch):
    monkeypatch.setattr(verify, "_localization_dim", lambda p, window: p)
    report = verify_all(3, 2)
    assert not report.stage("cross_count").passed
    assert report.cross_count is None
    assert not report.passed


def test_fixed_point_stage_reports_nodal_cases():
    detail = verify_all(5, 2).stage("fixed_points").detail
    assert "235 nodal trees (fixed_point_free=195 unequal_label_counts=40 stability=0), 0 admit σ" in detail
    assert "no nodal fixed points" in detail


def test_nodal_survivor_without_contradiction_fails_the_stage(monkeypatch):
    tree = DualTree(3, ((1, 2, 3),))
    forged = replace(nodal_witness(tree), tree=StableTree(3, ((1, 2),)))
    monkeypatch.setattr(verify, "nodal_witnesses", lambda p: [forged])
    stage = verify_all(3, 2).stage("fixed_points")
    assert not stage.passed
    assert "1 admit σ" in stage.detail
    assert "nodal fixed point found" in stage.detail


def test_group_cohomology_stage_checks_regular_witnesses():
    stage = verify_all(3, 2).stage("group_cohomology")
    assert stage.passed and stage.value == 8
    assert "12 regular cocycles bounded by explicit witnesses" in stage.detail


def test_failed_regular_witness_fails_the_stage(monkeypatch):
    monkeypatch.setattr(verify, "certify_regular_vanishing", lambda p, max_i: (12, [3]))
    stage = verify_all(3, 2).stage("group_cohomology")
    assert not stage.passed
    assert "witness fails in degrees [3]" in stage.detail
