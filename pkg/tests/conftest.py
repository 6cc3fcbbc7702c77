import math

import pytest
from hypothesis import HealthCheck, settings

from asian_greeks import MarketParams, validated_grid

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid200():
    """The 200-point validated-domain grid shared by the consistency checks."""
    return validated_grid(200, seed=0)


@pytest.fixture
def scenario1():
    """Scenario of the benchmark Greeks table: K=100, r=0.1, q=0, sigma=0.25, T=0.5."""
    return MarketParams(100.0, 0.1, 0.0, 0.25)


def rel_close(a, b, rel):
    return abs(a - b) <= rel * max(abs(a), abs(b))


def assert_rel(a, b, rel):
    assert rel_close(a, b, rel), f"{a!r} vs {b!r}: rel err {abs(a - b) / max(abs(a), abs(b), math.ulp(0)):.3g}"


# acceptance reporting ------------------------------------------------------------
#
# Tests marked ``criterion(n, title)`` are grouped; after the run one line per
# criterion reports PASS only if every sub-check of that criterion passed.

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion sub-check")


def pytest_collection_finish(session):
    for item in session.items:
        mark = item.get_closest_marker("criterion")
        if mark is None:
            continue
        number, title = mark.args
        entry = _CRITERIA.setdefault(number, {"title": title, "nodes": set(), "failed": [], "passed": 0})
        entry["nodes"].add(item.nodeid)


def pytest_runtest_logreport(report):
    for entry in _CRITERIA.values():
        if report.nodeid not in entry["nodes"]:
            continue
        if report.failed:
            entry["failed"].append(report.nodeid.split("::")[-1])
        elif report.when == "call" and report.passed:
            entry["passed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        total = len(entry["nodes"])
        verdict = "FAIL" if entry["failed"] else ("PASS" if entry["passed"] == total else "INCOMPLETE")
        line = f"criterion {number:2d} {verdict}  {entry['title']}  ({entry['passed']}/{total} sub-checks)"
        if entry["failed"]:
            line += "  failed: " + ", ".join(sorted(set(entry["failed"])))
        terminalreporter.write_line(line)
