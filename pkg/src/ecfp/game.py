"""Finite identical-interest normal-form games and their mixed utility."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from ecfp import _kernels
from ecfp.errors import InvalidArgumentError, ResourceError

DEFAULT_SIZE_CAP = 10**7
SIMPLEX_NEG_TOL = 1e-12
SIMPLEX_SUM_TOL = 1e-9


class Game:
    """A game in which every player shares one utility tensor.

    ``utility[y_1, ..., y_n]`` is the common payoff of the pure profile ``y``.
    The tensor is stored dense and read-only.
    """

    def __init__(self, action_counts: Sequence[int], utility, size_cap: int = DEFAULT_SIZE_CAP):
        counts = tuple(int(m) for m in action_counts)
        if len(counts) < 2:
            raise InvalidArgumentError(f"a game needs at least 2 players, got {len(counts)}")
        for i, m in enumerate(counts):
            if m < 1:
                raise InvalidArgumentError(f"player {i} has {m} actions; need at least 1")
        size = math.prod(counts)
        if size > size_cap:
            raise ResourceError(
                f"utility tensor would have {size} entries, above the cap of {size_cap}; "
                "use a smaller game or raise the cap")
        u = np.array(utility, dtype=np.float64)
        if u.size != size:
            raise InvalidArgumentError(
                f"utility has {u.size} entries but action counts {list(counts)} need {size}")
        if not np.all(np.isfinite(u)):
            raise InvalidArgumentError("utility entries must be finite")
        u = u.reshape(counts)
        u.setflags(write=False)
        self.action_counts = counts
        self.utility = u
        self._flat = np.ascontiguousarray(u).ravel()
        self._shape = np.array(counts, dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.action_counts)

    @property
    def max_actions(self) -> int:
        return max(self.action_counts)

    @property
    def utility_range(self) -> float:
        return float(self.utility.max() - self.utility.min())

    def __repr__(self):
        return f"Game(action_counts={list(self.action_counts)})"

    def __eq__(self, other):
        if not isinstance(other, Game):
            return NotImplemented
        return (self.action_counts == other.action_counts
                and np.array_equal(self.utility, other.utility))

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "players": self.n,
            "actions": list(self.action_counts),
            "utility": [float(x) for x in self._flat],
        }

    @classmethod
    def from_dict(cls, data: dict, size_cap: int = DEFAULT_SIZE_CAP) -> "Game":
        expected = {"players", "actions", "utility"}
        keys = set(data)
        if keys != expected:
            raise InvalidArgumentError(
                f"game JSON must have exactly the fields {sorted(expected)}, got {sorted(keys)}")
        if len(data["actions"]) != data["players"]:
            raise InvalidArgumentError(
                f"'players' is {data['players']} but 'actions' lists {len(data['actions'])} counts")
        return cls(data["actions"], [float(x) for x in data["utility"]], size_cap=size_cap)

    @classmethod
    def load(cls, path, size_cap: int = DEFAULT_SIZE_CAP) -> "Game":
        with open(path) as fh:
            return cls.from_dict(json.load(fh), size_cap=size_cap)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")


class JointMixedStrategy:
    """One mixed strategy per player.

    Stored as a zero-padded ``(n, max_m)`` matrix; ``strategies[i]`` gives the
    length-``m_i`` vector of player ``i``. Instances are immutable.
    """

    __slots__ = ("matrix", "action_counts")

    def __init__(self, strategies: Sequence[Sequence[float]], check: bool = True):
        rows = [np.asarray(s, dtype=np.float64).ravel() for s in strategies]
        counts = tuple(len(r) for r in rows)
        mat = np.zeros((len(rows), max(counts) if counts else 0))
        for i, r in enumerate(rows):
            mat[i, :len(r)] = r
        self._init(mat, counts, check)

    def _init(self, mat, counts, check):
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "action_counts", tuple(counts))
        if check:
            for i in range(len(counts)):
                check_mixed(self.matrix[i, :counts[i]], player=i)

    def __setattr__(self, name, value):
        raise AttributeError("JointMixedStrategy is immutable")

    @classmethod
    def from_matrix(cls, mat, action_counts, check: bool = True) -> "JointMixedStrategy":
        obj = cls.__new__(cls)
        obj._init(np.array(mat, dtype=np.float64), action_counts, check)
        return obj

    @classmethod
    def pure(cls, action_counts: Sequence[int], actions: Sequence[int]) -> "JointMixedStrategy":
        rows = []
        for m, a in zip(action_counts, actions):
            v = np.zeros(m)
            v[a] = 1.0
            rows.append(v)
        return cls(rows)

    @classmethod
    def uniform(cls, action_counts: Sequence[int]) -> "JointMixedStrategy":
        return cls([np.full(m, 1.0 / m) for m in action_counts])

    @property
    def n(self) -> int:
        return len(self.action_counts)

    @property
    def strategies(self) -> list:
        return [self.matrix[i, :m] for i, m in enumerate(self.action_counts)]

    def __getitem__(self, i):
        return self.matrix[i, :self.action_counts[i]]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, JointMixedStrategy):
            return NotImplemented
        return (self.action_counts == other.action_counts
                and np.array_equal(self.matrix, other.matrix))

    __hash__ = None

    def __repr__(self):
        return f"JointMixedStrategy({[s.tolist() for s in self.strategies]})"

    def to_list(self) -> list:
        return [s.tolist() for s in self.strategies]


def check_mixed(p, player=None) -> None:
    """Raise InvalidArgumentError unless ``p`` lies on the simplex (within rounding)."""
    where = "" if player is None else f" of player {player}"
    p = np.asarray(p)
    if p.size == 0:
        raise InvalidArgumentError(f"strategy{where} is empty")
    if not np.all(np.isfinite(p)):
        raise InvalidArgumentError(f"strategy{where} has non-finite entries")
    if p.min() < -SIMPLEX_NEG_TOL:
        raise InvalidArgumentError(f"strategy{where} has a negative entry {p.min()!r}")
    if abs(p.sum() - 1.0) > SIMPLEX_SUM_TOL:
        raise InvalidArgumentError(f"strategy{where} sums to {p.sum()!r}, not 1")


def check_conforms(game: Game, p: JointMixedStrategy) -> None:
    if p.n != game.n:
        raise InvalidArgumentError(f"strategy has {p.n} players, game has {game.n}")
    for i, (a, b) in enumerate(zip(p.action_counts, game.action_counts)):
        if a != b:
            raise InvalidArgumentError(
                f"player {i}: strategy has {a} entries, game has {b} actions")


def _padded(game: Game, p: JointMixedStrategy) -> np.ndarray:
    mat = p.matrix
    if mat.shape[1] != game.max_actions:
        out = np.zeros((game.n, game.max_actions))
        out[:, :mat.shape[1]] = mat
        return out
    return mat


def mixed_utility(game: Game, p: JointMixedStrategy) -> float:
    """Expected common payoff when players mix independently according to ``p``."""
    check_conforms(game, p)
    x = game.utility
    for i in range(game.n - 1, -1, -1):
        x = x @ p[i]
    return float(x)


def payoff_matrix(game: Game, p: JointMixedStrategy) -> np.ndarray:
    """Padded ``(n, max_m)`` array whose row ``i`` is ``payoff_vector(game, i, p)``.

    Padding entries are zero and carry no meaning.
    """
    check_conforms(game, p)
    return _kernels.payoff_matrix(game._flat, game._shape, _padded(game, p))


def payoff_vector(game: Game, i: int, p: JointMixedStrategy) -> np.ndarray:
    """Payoff of each pure action of player ``i`` against ``p_{-i}``.

    By linearity, U(p_i, p_{-i}) equals ``p[i] @ payoff_vector(game, i, p)``.
    Player ``i``'s own entry in ``p`` is ignored.
    """
    if not 0 <= i < game.n:
        raise InvalidArgumentError(f"player index {i} out of range for {game.n} players")
    return payoff_matrix(game, p)[i, :game.action_counts[i]].copy()
