import re

import pytest

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Lets an acceptance test attach a one-line measurement to its verdict."""
    key = request.node.nodeid
    _CRITERIA.setdefault(key, {"detail": ""})

    def note(text):
        _CRITERIA[key]["detail"] = text

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.nodeid in _CRITERIA:
        _CRITERIA[item.nodeid]["passed"] = rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, res in sorted(_CRITERIA.items(), key=lambda kv: kv[0]):
        m = re.search(r"test_criterion_(\d+)_(\w+)", nodeid)
        if not m or "passed" not in res:
            continue
        verdict = "PASS" if res["passed"] else "FAIL"
        name = m.group(2).replace("_", " ")
        terminalreporter.write_line(f"criterion {m.group(1)} ({name}): {verdict}  {res['detail']}")
