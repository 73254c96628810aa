"""Seeded game generators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ecfp.errors import InvalidArgumentError, ResourceError
from ecfp.game import DEFAULT_SIZE_CAP, Game
from ecfp.partition import Partition

KINDS = ("random_identical", "symmetric_classes")


@dataclass(frozen=True)
class GeneratorSpec:
    """``random_identical``: i.i.d. uniform[0, 1] utilities, singleton classes.

    ``symmetric_classes``: players form consecutive classes of the given
    sizes; the utility depends only on how many members of each class play
    each action, so it is invariant under swaps within a class.
    """

    kind: str
    action_counts: tuple
    class_sizes: tuple = field(default=())
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "action_counts", tuple(int(m) for m in self.action_counts))
        sizes = tuple(int(s) for s in self.class_sizes) or (1,) * len(self.action_counts)
        object.__setattr__(self, "class_sizes", sizes)
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown generator kind {self.kind!r}; use one of {KINDS}")
        if sum(sizes) != self.n or min(sizes) < 1:
            raise InvalidArgumentError(f"class sizes {list(sizes)} do not split {self.n} players")
        if self.kind == "random_identical" and set(sizes) != {1}:
            raise InvalidArgumentError("random_identical games only support singleton classes")
        for c in Partition.from_sizes(sizes).classes:
            if len({self.action_counts[i] for i in c}) > 1:
                raise InvalidArgumentError(f"players {list(c)} share a class but differ in action count")

    @property
    def n(self) -> int:
        return len(self.action_counts)

    @property
    def partition(self) -> Partition:
        return Partition.from_sizes(self.class_sizes)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "players": self.n, "actions": list(self.action_counts),
                "class_sizes": list(self.class_sizes), "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        allowed = {"kind", "players", "actions", "class_sizes", "seed"}
        unknown = set(data) - allowed
        if unknown:
            raise InvalidArgumentError(f"unknown generator fields {sorted(unknown)}")
        if "players" in data and data["players"] != len(data["actions"]):
            raise InvalidArgumentError(f"'players' is {data['players']} but 'actions' has {len(data['actions'])} entries")
        return cls(data["kind"], tuple(data["actions"]), tuple(data.get("class_sizes", ())),
                   int(data.get("seed", 0)))


def _class_histograms(counts, part: Partition) -> np.ndarray:
    """One row per pure profile (row-major): per-class counts of each action."""
    profiles = np.indices(counts).reshape(len(counts), -1)
    cols = []
    for c in part.classes:
        members = profiles[list(c)]
        for a in range(counts[c[0]]):
            cols.append((members == a).sum(axis=0))
    return np.stack(cols, axis=1)


def generate_game(spec: GeneratorSpec, size_cap: int = DEFAULT_SIZE_CAP) -> tuple:
    """Return ``(game, partition)``; deterministic in ``spec.seed``."""
    size = math.prod(spec.action_counts)
    if size > size_cap:
        raise ResourceError(f"generated game would have {size} entries, above the cap of {size_cap}")
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed]))
    part = spec.partition
    if spec.kind == "random_identical":
        utility = rng.random(size)
    else:
        hist = _class_histograms(spec.action_counts, part)
        keys, inverse = np.unique(hist, axis=0, return_inverse=True)
        utility = rng.random(len(keys))[inverse.ravel()]
    return Game(spec.action_counts, utility, size_cap=size_cap), part
