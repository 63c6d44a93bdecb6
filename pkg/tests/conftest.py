from __future__ import annotations

import functools

import pytest

from gridcyber.cyber import build_cyber_model
from gridcyber.placement import plan_sites
from gridcyber.synthetic import PRESETS, preset_case
from gridcyber.wan import build_wan


@functools.lru_cache(maxsize=None)
def preset(name: str):
    p = PRESETS[name]
    case = preset_case(name)
    return case, plan_sites(case, p.utilities, p.bas, seed=0)


@functools.lru_cache(maxsize=None)
def preset_wan(name: str, topology: str):
    case, plan = preset(name)
    return build_wan(topology, case, plan, seed=0)


@functools.lru_cache(maxsize=None)
def preset_model(name: str, topology: str = "star"):
    case, plan = preset(name)
    return build_cyber_model(case, plan, preset_wan(name, topology))


@pytest.fixture(scope="session")
def sc():
    return preset("sc")


@pytest.fixture(scope="session")
def sc_model():
    return preset_model("sc", "star")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("GRIDCYBER_CACHE_DIR", str(tmp_path / "cache"))


# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {n:>2}. {title}: {detail}")
