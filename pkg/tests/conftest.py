import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n, name = int(m.group(1)), m.group(2).replace("_", " ")
    if report.failed or (report.when == "call" and n not in _results):
        _results[n] = ("FAIL" if report.failed else "PASS", name)
    elif report.when == "call" and _results[n][0] != "FAIL":
        _results[n] = ("PASS", name)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status, name = _results[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {name}")
