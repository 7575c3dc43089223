import random

import pytest
from hypothesis import settings

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=40)
settings.load_profile("repo")

ACCEPTANCE_LINES = []

CONFIGS = [(1, 2), (2, 2), (1, 3), (2, 3)]


@pytest.fixture
def rng(request):
    return random.Random(request.node.nodeid)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
