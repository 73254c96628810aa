import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ecfp.game import Game, JointMixedStrategy

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

MATCHING = [[1.0, 0.0], [0.0, 1.0]]


@pytest.fixture
def matching():
    return Game([2, 2], MATCHING)


def random_game(rng, counts):
    return Game(counts, rng.random(int(np.prod(counts))))


def random_joint(rng, counts):
    return JointMixedStrategy([rng.dirichlet(np.ones(m)) for m in counts])


def random_counts(rng, max_players=4, max_actions=3):
    n = int(rng.integers(2, max_players + 1))
    return [int(rng.integers(1, max_actions + 1)) for _ in range(n)]


# one line per acceptance criterion, echoed after the run even without -s
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
