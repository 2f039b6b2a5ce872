import pytest

from flexfet_rx.config import SystemConfig
from flexfet_rx.pipeline import evaluate


@pytest.fixture(scope="session")
def cfg():
    return SystemConfig()


@pytest.fixture(scope="session")
def report(cfg):
    return evaluate(cfg)


@pytest.fixture(scope="session")
def bias(report):
    return report.bias


# --------------------------------------------------------------------------
# per-criterion PASS/FAIL lines for the acceptance module

_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, description): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _RESULTS.append((mark.args[0], mark.args[1], item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    by_number = {}
    for number, desc, name, passed in _RESULTS:
        entry = by_number.setdefault(number, [desc, []])
        entry[1].append((name, passed))
    for number in sorted(by_number, key=int):
        desc, runs = by_number[number]
        ok = all(p for _, p in runs)
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {desc}")
        if len(runs) > 1:
            for name, passed in runs:
                tr.write_line(f"    {'PASS' if passed else 'FAIL'}  {name}")
