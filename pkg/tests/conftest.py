import pytest

_verdicts: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion.

    Call ``criterion(number, detail)`` once the test's checks are assembled;
    the verdict flips to FAIL if the test body later raises.
    """
    marker = request.node.get_closest_marker("criterion")
    number = marker.args[0] if marker else None
    notes = []

    def note(detail: str):
        notes.append(detail)

    yield note
    if number is not None:
        failed = getattr(request.node, "_call_failed", False)
        _verdicts[number] = ("FAIL" if failed else "PASS", "; ".join(notes))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and report.failed:
        item._call_failed = True


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_verdicts):
        verdict, detail = _verdicts[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {detail}".rstrip())
