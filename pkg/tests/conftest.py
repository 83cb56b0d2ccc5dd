import pytest

_criteria: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = "; ".join(v for k, v in item.user_properties if k == "detail")
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _criteria[n] = (status, item.name, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        status, name, detail = _criteria[n]
        line = f"criterion {n:>2}: {status}  {name}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
