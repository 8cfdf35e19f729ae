from __future__ import annotations

import json
from collections import OrderedDict
from pathlib import Path

import pytest

from gridrisk.catalog import load_catalog
from gridrisk.cli import sample_path

GOLDEN = Path(__file__).parent / "golden"
SAMPLES = ("florida-coast", "cyber-zigbee", "integrated-energy", "integrated-energy-chp-heat")

_criteria: "OrderedDict[str, list[bool]]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion this test belongs to")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    name = getattr(report, "acceptance_name", None)
    if name is None:
        return
    _criteria.setdefault(name, []).append(report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().acceptance_name = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in _criteria.items():
        verdict = "PASS" if results and all(results) else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  ({sum(results)}/{len(results)} checks)")


@pytest.fixture(scope="session")
def florida_path() -> Path:
    return sample_path("florida-coast")


@pytest.fixture(scope="session")
def florida(florida_path):
    return load_catalog(florida_path)


@pytest.fixture(scope="session")
def energy():
    return load_catalog(sample_path("integrated-energy"))


@pytest.fixture(scope="session")
def energy_chp_heat():
    return load_catalog(sample_path("integrated-energy-chp-heat"))


@pytest.fixture
def florida_doc(florida_path) -> dict:
    return json.loads(florida_path.read_text())
