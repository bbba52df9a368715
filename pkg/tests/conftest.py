"""Shared pytest setup: hypothesis profile and the acceptance summary.

Tests marked ``criterion(n, title)`` are grouped by ``n``; after the run one
PASS/FAIL line is printed per criterion. A criterion passes only when every
test carrying its number passed; an expected failure counts as FAIL.
"""

from collections import defaultdict

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_outcomes = defaultdict(list)
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    report = (yield).get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when != "call" and report.passed:
        return
    n, title = marker.args
    _titles[n] = title
    ok = report.passed and not hasattr(report, "wasxfail")
    details = [str(v) for k, v in item.user_properties if k == "detail"]
    if hasattr(report, "wasxfail"):
        details.append("expected failure: " + report.wasxfail)
    _outcomes[n].append((ok, "; ".join(details)))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_outcomes):
        results = _outcomes[n]
        ok = all(r[0] for r in results)
        detail = "; ".join(r[1] for r in results if r[1])
        tr.write_line(f"criterion {n:2d}  {'PASS' if ok else 'FAIL'}  {_titles[n]}"
                      + (f"  [{detail}]" if detail else ""))
