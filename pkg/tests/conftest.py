import sys
from pathlib import Path

import pytest

# make tests/oracles.py importable regardless of invocation directory
sys.path.insert(0, str(Path(__file__).parent))

import acceptance_report
from tdsearch.games import GAMES


@pytest.fixture(params=sorted(GAMES))
def game_id(request):
    return request.param


@pytest.fixture
def game(game_id):
    return GAMES[game_id]


def pytest_terminal_summary(terminalreporter):
    if acceptance_report.lines:
        terminalreporter.section("acceptance")
        for line in acceptance_report.lines:
            terminalreporter.write_line(line)
