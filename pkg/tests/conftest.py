import pytest

from superyangian.foundation import RankData

DESK_RANKS = [(2, 3), (3, 2), (2, 4), (3, 4)]


@pytest.fixture(params=[(3, 2), (2, 3)], ids=lambda mn: f"gl{mn[0]}|{mn[1]}")
def small_ctx(request):
    return RankData(*request.param)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line; the lines are repeated in the terminal summary."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(name, ok, tolerance, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name} (tolerance: {tolerance})"
        if detail:
            line += f": {detail}"
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
