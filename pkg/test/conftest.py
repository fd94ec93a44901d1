from __future__ import annotations

import logging
import random
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from dmcert.dm_basis import enumerate_basis  # noqa: E402
from dmcert.serre_e2 import assemble_e2  # noqa: E402


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: p = 7 sweeps and other multi-second runs")


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in (
        "DMCERT_LOG_LEVEL",
        "DMCERT_WINDOW",
        "DMCERT_MAX_I_EXTRA",
        "DMCERT_LOCALIZATION_WINDOW",
        "DMCERT_TREE_MAX_P",
    ):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture(autouse=True)
def _restore_logging():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers = handlers
    root.setLevel(level)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)


_PAGES = {}


@pytest.fixture
def page():
    """Assembled E2 pages, built once per prime."""
    def get(p: int):
        if p not in _PAGES:
            _PAGES[p] = assemble_e2(p, basis=enumerate_basis(p))
        return _PAGES[p]
    return get
