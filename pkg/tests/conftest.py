import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bufferpartition import TrafficParams  # noqa: E402

_CRITERIA_KEY = pytest.StashKey[list]()


@pytest.fixture
def paper_params():
    return TrafficParams(lambda_rt=12, lambda_nrt=6, mu_rt=20, mu_nrt=10)


@pytest.fixture
def record_criterion(request):
    """Record one acceptance line ``(id, text, passed)`` for the terminal summary."""
    lines = request.config.stash.setdefault(_CRITERIA_KEY, [])

    def record(cid, text, passed):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {cid}: {text}"
        lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
