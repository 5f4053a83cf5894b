import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Register the running test as acceptance criterion ``n``."""
    def register(n, title):
        _CRITERIA[request.node.nodeid] = [n, title, None]
    return register


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    entry = _CRITERIA.get(item.nodeid)
    if entry is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        entry[2] = rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok in sorted(_CRITERIA.values()):
        mark = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {mark}  {title}")
