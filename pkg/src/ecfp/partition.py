"""Permutation-invariant partitions of the player set and centroid distributions.

Also holds the executable checks for the rearrangement identity and for the
fact that centroids of eps-best responses are themselves eps-best responses.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ecfp import _kernels
from ecfp.errors import InvalidArgumentError, ResourceError
from ecfp.game import Game, JointMixedStrategy, check_conforms, mixed_utility, payoff_matrix

COMPARISON_BUDGET = 10**8
LEMMA_SLACK = 1e-10


@dataclass(frozen=True)
class Partition:
    """Classes of players, given as tuples of 0-based player indices.

    Construction accepts overlapping or incomplete collections so that
    ``validate_partition`` can report them; ``phi`` requires a proper partition.
    """

    classes: tuple

    def __init__(self, classes: Sequence[Sequence[int]]):
        object.__setattr__(self, "classes", tuple(tuple(int(i) for i in c) for c in classes))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls([[i] for i in range(n)])

    @classmethod
    def single_class(cls, n: int) -> "Partition":
        return cls([list(range(n))])

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "Partition":
        """Consecutive blocks of players with the given class sizes."""
        out, start = [], 0
        for s in sizes:
            out.append(list(range(start, start + s)))
            start += s
        return cls(out)

    @property
    def m(self) -> int:
        return len(self.classes)

    @property
    def n(self) -> int:
        return 1 + max((i for c in self.classes for i in c), default=-1)

    def phi(self, n: int | None = None) -> tuple:
        """Class index of every player."""
        n = self.n if n is None else n
        out = [-1] * n
        for k, c in enumerate(self.classes):
            for i in c:
                if not 0 <= i < n:
                    raise InvalidArgumentError(f"player index {i} out of range for {n} players")
                if out[i] != -1:
                    raise InvalidArgumentError(f"player {i} is in classes {out[i]} and {k}")
                out[i] = k
        missing = [i for i, k in enumerate(out) if k == -1]
        if missing:
            raise InvalidArgumentError(f"players {missing} are in no class")
        return tuple(out)

    def class_index(self, n: int) -> np.ndarray:
        return np.array(self.phi(n), dtype=np.int64)

    def to_dict(self) -> dict:
        return {"classes": [list(c) for c in self.classes]}

    @classmethod
    def from_dict(cls, data: dict) -> "Partition":
        if set(data) != {"classes"}:
            raise InvalidArgumentError(f"partition JSON must have exactly the field 'classes', got {sorted(data)}")
        return cls(data["classes"])


@dataclass
class PartitionValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def conditions(self) -> set:
        return {cond for cond, _ in self.violations}

    def __str__(self):
        if self.valid:
            return "valid"
        return "invalid: " + "; ".join(f"({c}) {w}" for c, w in self.violations)


def validate_partition(game: Game, part: Partition, tolerance: float = 0.0) -> PartitionValidationReport:
    """Check disjointness (i), cover (ii), equal action sets (iii) and swap invariance (iv).

    Swap invariance is checked on every pure profile for every pair of players
    sharing a class; utilities must agree within ``tolerance`` (0 means bit
    equality). Only the first violation of each condition is reported.
    """
    n = game.n
    for c in part.classes:
        if not c:
            raise InvalidArgumentError("partition contains an empty class")
        for i in c:
            if not 0 <= i < n:
                raise InvalidArgumentError(f"player index {i} out of range for {n} players")

    pairs = [(i, j) for c in part.classes for i, j in itertools.combinations(sorted(set(c)), 2)]
    size = math.prod(game.action_counts)
    if size * len(pairs) > COMPARISON_BUDGET:
        raise ResourceError(
            f"swap check needs {size * len(pairs)} comparisons (budget {COMPARISON_BUDGET}); "
            "use a smaller game or coarser test partition")

    report = PartitionValidationReport()
    owner = {}
    for k, c in enumerate(part.classes):
        for i in c:
            if i in owner:
                report.violations.append(("i", f"player {i} appears in classes {owner[i]} and {k}"))
                break
            owner[i] = k
        else:
            continue
        break

    missing = [i for i in range(n) if i not in owner]
    if missing:
        report.violations.append(("ii", f"players {missing} are not covered"))

    u = game.utility
    counts = game.action_counts
    iii_done = iv_done = False
    for i, j in pairs:
        if counts[i] != counts[j]:
            if not iii_done:
                report.violations.append(
                    ("iii", f"players {i} and {j} share a class but have {counts[i]} and {counts[j]} actions"))
                iii_done = True
            continue
        if iv_done:
            continue
        swapped = np.swapaxes(u, i, j)
        if tolerance == 0.0:
            bad = u != swapped
        else:
            bad = np.abs(u - swapped) > tolerance
        if bad.any():
            y = tuple(int(x) for x in np.argwhere(bad)[0])
            ys = list(y)
            ys[i], ys[j] = ys[j], ys[i]
            report.violations.append(
                ("iv", f"swapping players {i} and {j} at profile {list(y)} changes utility "
                       f"{u[y]!r} -> {u[tuple(ys)]!r}"))
            iv_done = True
    return report


def _class_centroid(part: Partition, mat: np.ndarray) -> np.ndarray:
    n = mat.shape[0]
    out = np.empty_like(mat)
    _kernels.centroid_into(np.ascontiguousarray(mat), part.class_index(n), part.m, out)
    return out


def centroid(part: Partition, p: JointMixedStrategy) -> JointMixedStrategy:
    """Replace every player's strategy by the average over their class.

    Averages are summed in ascending player order and divided once, so all
    members of a class receive bitwise identical vectors.
    """
    part.phi(p.n)
    for c in part.classes:
        sizes = {p.action_counts[i] for i in c}
        if len(sizes) > 1:
            raise InvalidArgumentError(f"class {list(c)} mixes strategy lengths {sorted(sizes)}")
    return JointMixedStrategy.from_matrix(_class_centroid(part, p.matrix), p.action_counts, check=False)


def _utilities_against(game: Game, p: JointMixedStrategy, belief: JointMixedStrategy) -> np.ndarray:
    """U(p_i, belief_{-i}) for every player i."""
    pay = payoff_matrix(game, belief)
    return np.array([p[i] @ pay[i, :m] for i, m in enumerate(game.action_counts)])


def check_rearrangement(game: Game, part: Partition, p: JointMixedStrategy) -> float:
    """Residual of the identity (1/n) sum_i U(p_i, pbar_{-i}) = U(pbar)."""
    check_conforms(game, p)
    pbar = centroid(part, p)
    lhs = float(np.mean(_utilities_against(game, p, pbar)))
    return abs(lhs - mixed_utility(game, pbar))


def permutation_br_status(game: Game, part: Partition, p: JointMixedStrategy,
                          q: JointMixedStrategy, eps: float) -> tuple:
    """Return ``(hypothesis, conclusion)`` for the centroid best-response property.

    hypothesis: every p_i is an eps-best response to qbar_{-i};
    conclusion: every pbar_i is an eps-best response to qbar_{-i}.
    Both use the slack ``LEMMA_SLACK``.
    """
    if eps < 0:
        raise InvalidArgumentError(f"eps must be nonnegative, got {eps}")
    check_conforms(game, p)
    check_conforms(game, q)
    qbar = centroid(part, q)
    pbar = centroid(part, p)
    pay = payoff_matrix(game, qbar)
    best = np.array([pay[i, :m].max() for i, m in enumerate(game.action_counts)])
    floor = best - eps - LEMMA_SLACK
    hyp = bool(np.all(_utilities_against(game, p, qbar) >= floor))
    concl = bool(np.all(_utilities_against(game, pbar, qbar) >= floor))
    return hyp, concl


def check_permutation_br(game: Game, part: Partition, p: JointMixedStrategy,
                         q: JointMixedStrategy, eps: float) -> bool:
    """True unless the hypothesis holds and the conclusion fails."""
    hyp, concl = permutation_br_status(game, part, p, q, eps)
    return concl or not hyp
