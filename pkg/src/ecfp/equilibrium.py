"""Best responses and equilibrium gaps.

Every gap is the largest payoff improvement any single player could obtain
by deviating, so it is nonnegative and vanishes exactly on the corresponding
equilibrium set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ecfp.errors import InvalidArgumentError
from ecfp.game import Game, JointMixedStrategy, check_conforms, payoff_matrix
from ecfp.partition import Partition, centroid

DEFAULT_TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BestResponseQuery:
    player: int
    belief: JointMixedStrategy
    epsilon: float = 0.0
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise InvalidArgumentError(f"epsilon must be >= 0, got {self.epsilon}")
        if not self.tie_tolerance > 0:
            raise InvalidArgumentError(f"tie_tolerance must be > 0, got {self.tie_tolerance}")


def _check_player(game: Game, i: int) -> None:
    if not 0 <= i < game.n:
        raise InvalidArgumentError(f"player index {i} out of range for {game.n} players")


def best_response_value(game: Game, i: int, belief: JointMixedStrategy) -> float:
    """max over mixed alpha of U(alpha, belief_{-i}); attained at a pure action."""
    _check_player(game, i)
    return float(payoff_matrix(game, belief)[i, :game.action_counts[i]].max())


def epsilon_br_actions(game: Game, query: BestResponseQuery) -> frozenset:
    """Pure actions whose payoff is within ``epsilon`` (plus tie tolerance) of the best."""
    i = query.player
    _check_player(game, i)
    pay = payoff_matrix(game, query.belief)[i, :game.action_counts[i]]
    thr = pay.max() - query.epsilon - query.tie_tolerance
    return frozenset(int(a) for a in np.flatnonzero(pay >= thr))


def _deviation_gain(game: Game, p: JointMixedStrategy, belief: JointMixedStrategy) -> float:
    pay = payoff_matrix(game, belief)
    gains = [pay[i, :m].max() - p[i] @ pay[i, :m] for i, m in enumerate(game.action_counts)]
    return float(max(gains))


def ne_gap(game: Game, p: JointMixedStrategy) -> float:
    check_conforms(game, p)
    return _deviation_gain(game, p, p)


def mce_gap(game: Game, part: Partition, p: JointMixedStrategy) -> float:
    """Largest gain from deviating when each player faces the centroid of play."""
    check_conforms(game, p)
    return _deviation_gain(game, p, centroid(part, p))


def symmetry_gap(part: Partition, p: JointMixedStrategy) -> float:
    """Largest sup-norm distance between strategies of two players in one class."""
    worst = 0.0
    for c in part.classes:
        rows = p.matrix[list(c)]
        if len(c) > 1:
            worst = max(worst, float((rows.max(axis=0) - rows.min(axis=0)).max()))
    return worst


def sne_gap(game: Game, part: Partition, p: JointMixedStrategy) -> float:
    check_conforms(game, p)
    return max(ne_gap(game, p), symmetry_gap(part, p))
