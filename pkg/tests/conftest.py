import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_outcomes: dict[int, list[bool]] = defaultdict(list)
_titles: dict[int, str] = {}


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None and (rep.when == "call" or rep.failed or rep.skipped):
        number, title = marker.args
        _titles[number] = title
        if rep.when == "call" or rep.failed:
            _outcomes[number].append(rep.passed)
    return rep


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_titles):
        results = _outcomes.get(number, [])
        ok = bool(results) and all(results)
        terminalreporter.write_line(f"ACCEPTANCE [{'PASS' if ok else 'FAIL'}] criterion {number}: {_titles[number]}")
