"""Shared pytest hooks: collects acceptance outcomes into one line per criterion."""

import pytest

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test belongs to acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        n = marker.args[0]
        ok, details = _criteria.get(n, (True, []))
        details = details + [v for k, v in item.user_properties if k == "detail"]
        _criteria[n] = (ok and rep.passed, details)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, details = _criteria[n]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
        if details:
            line += "  (" + "; ".join(details) + ")"
        terminalreporter.write_line(line)
