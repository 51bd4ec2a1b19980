import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = marker.args
        _RESULTS[number] = (title, report.passed, getattr(item, "elapsed", None))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, passed, elapsed = _RESULTS[number]
        timing = "" if elapsed is None else f" ({elapsed:.2f}s)"
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {title}{timing}")
