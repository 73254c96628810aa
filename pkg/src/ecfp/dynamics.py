"""Fictitious play and empirical centroid fictitious play processes.

All three processes share one update rule,

    q(t+1) = q(t) + gamma_t * (a(t+1) - q(t)),

and differ only in what players respond to: classical FP responds to the
opponents' empirical distributions q(t), ECFP to the class centroids qbar(t),
and the Euler flow is ECFP with a constant step ``h`` and exact responses.
The centroid qbar is carried along by the same recursion applied to the
class-averaged action and is checked against a fresh centroid of q after
every step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ecfp import _kernels
from ecfp.equilibrium import mce_gap, ne_gap, sne_gap
from ecfp.errors import InternalConsistencyError, InvalidArgumentError
from ecfp.game import Game, JointMixedStrategy, check_conforms, mixed_utility, payoff_matrix
from ecfp.partition import Partition, centroid
from ecfp.trace import Trace, TraceRecord

log = logging.getLogger(__name__)

SELECTION_TIE_TOLERANCE = 1e-12
ADMISSIBILITY_SLACK = 1e-10
CENTROID_DRIFT_TOLERANCE = 1e-9
SIMPLEX_NEG_TOLERANCE = 1e-12

# labels for deriving independent RNG streams from one master seed
STREAM_ACTIONS = 1
STREAM_INITIAL = 2

_MODES = {"exact": _kernels.MODE_EXACT,
          "uniform_eps": _kernels.MODE_UNIFORM_EPS,
          "mixed_eps": _kernels.MODE_MIXED_EPS}
PROCESSES = ("fp", "ecfp", "euler")


@dataclass(frozen=True)
class StepSizeSchedule:
    """gamma_t = (t + t0) ** -rho; ``classical`` is rho=1, t0=1, i.e. 1/(t+1).

    Restricting rho to (0, 1] and t0 >= 0 keeps gamma_t positive, vanishing
    and non-summable.
    """

    family: str = "classical"
    rho: float = 1.0
    t0: float = 1.0

    def __post_init__(self):
        if self.family == "classical":
            object.__setattr__(self, "rho", 1.0)
            object.__setattr__(self, "t0", 1.0)
        elif self.family != "power":
            raise InvalidArgumentError(f"unknown step-size family {self.family!r}")
        if not 0.0 < self.rho <= 1.0:
            raise InvalidArgumentError(f"rho must lie in (0, 1], got {self.rho}")
        if not self.t0 >= 0.0:
            raise InvalidArgumentError(f"t0 must be >= 0, got {self.t0}")

    @classmethod
    def classical(cls) -> "StepSizeSchedule":
        return cls("classical")

    @classmethod
    def power(cls, rho: float, t0: float = 0.0) -> "StepSizeSchedule":
        return cls("power", rho, t0)

    def values(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if self.family == "classical":
            return 1.0 / (t + 1.0)
        return np.power(t + self.t0, -self.rho)


@dataclass(frozen=True)
class ConstantStep:
    """Fixed step ``h``; drives the Euler discretization of the continuous flow."""

    h: float

    def values(self, t) -> np.ndarray:
        return np.full(np.shape(t), float(self.h))


@dataclass(frozen=True)
class EpsilonSchedule:
    """eps_t = 0 (``zero``) or c * (t + 1) ** -beta (``power``)."""

    family: str = "zero"
    c: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if self.family not in ("zero", "power"):
            raise InvalidArgumentError(f"unknown epsilon family {self.family!r}")
        if not self.c >= 0.0:
            raise InvalidArgumentError(f"c must be >= 0, got {self.c}")
        if not self.beta > 0.0:
            raise InvalidArgumentError(f"beta must be > 0, got {self.beta}")

    @classmethod
    def zero(cls) -> "EpsilonSchedule":
        return cls("zero")

    @classmethod
    def power(cls, c: float, beta: float) -> "EpsilonSchedule":
        return cls("power", c, beta)

    def values(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if self.family == "zero":
            return np.zeros(t.shape)
        return self.c * np.power(t + 1.0, -self.beta)


def gamma_at(s, t: int) -> float:
    if t < 1:
        raise InvalidArgumentError(f"iterations start at 1, got {t}")
    return float(s.values(np.array([t]))[0])


def epsilon_at(s: EpsilonSchedule, t: int) -> float:
    if t < 1:
        raise InvalidArgumentError(f"iterations start at 1, got {t}")
    return float(s.values(np.array([t]))[0])


@dataclass(frozen=True)
class SelectionMode:
    """How a member of the eps-best-response set is picked.

    exact: lowest-index exact best response.
    uniform_eps: a pure action drawn uniformly from the eps-best actions.
    mixed_eps: the uniform mixture of the eps-best actions.
    """

    variant: str = "exact"
    seed: int = 0

    def __post_init__(self):
        if self.variant not in _MODES:
            raise InvalidArgumentError(f"unknown selection mode {self.variant!r}; use one of {sorted(_MODES)}")

    @property
    def code(self) -> int:
        return _MODES[self.variant]


def player_rngs(seed: int, n: int) -> list:
    """One generator per player, each derived from ``seed`` by a fixed label."""
    return [np.random.default_rng(np.random.SeedSequence([seed, STREAM_ACTIONS, i])) for i in range(n)]


@dataclass(frozen=True)
class ProcessState:
    t: int
    q: JointMixedStrategy
    q_bar: JointMixedStrategy
    last_action: JointMixedStrategy


def initial_action(game: Game, how: str = "zero", seed: int = 0) -> JointMixedStrategy:
    """Starting joint action: every player's action 0, or a seeded uniform draw."""
    if how == "zero":
        actions = [0] * game.n
    elif how == "random":
        rng = np.random.default_rng(np.random.SeedSequence([seed, STREAM_INITIAL]))
        actions = [int(rng.integers(m)) for m in game.action_counts]
    else:
        raise InvalidArgumentError(f"unknown initial action rule {how!r}; use 'zero' or 'random'")
    return JointMixedStrategy.pure(game.action_counts, actions)


def initial_state(game: Game, part: Partition, a1: JointMixedStrategy | None = None) -> ProcessState:
    """State at t=1 with q(1) = a(1)."""
    a1 = initial_action(game) if a1 is None else a1
    check_conforms(game, a1)
    part.phi(game.n)
    return ProcessState(1, a1, centroid(part, a1), a1)


def _draw_uniforms(mode: SelectionMode, rng, n: int, steps: int) -> np.ndarray:
    if mode.variant != "uniform_eps":
        return np.zeros((steps, n))
    if rng is None:
        raise InvalidArgumentError("uniform_eps selection needs per-player generators")
    return np.stack([g.random(steps) for g in rng], axis=1)


def _padded(game: Game, p: JointMixedStrategy) -> np.ndarray:
    out = np.zeros((game.n, game.max_actions))
    out[:, :p.matrix.shape[1]] = p.matrix
    return out


def select_action(game: Game, part: Partition, q_bar: JointMixedStrategy, eps: float,
                  mode: SelectionMode, rng: Sequence[np.random.Generator] | None = None) -> JointMixedStrategy:
    """Joint action inside BR^eps(q_bar), verified against the payoff vectors."""
    if eps < 0:
        raise InvalidArgumentError(f"eps must be >= 0, got {eps}")
    check_conforms(game, q_bar)
    pay = payoff_matrix(game, q_bar)
    out = np.zeros((game.n, game.max_actions))
    uniforms = _draw_uniforms(mode, rng, game.n, 1)[0]
    _kernels.select_into(pay, game._shape, float(eps), mode.code, uniforms, SELECTION_TIE_TOLERANCE, out)
    if not _kernels.admissible(pay, game._shape, out, float(eps), ADMISSIBILITY_SLACK):
        raise InternalConsistencyError("selected action is not an eps-best response")
    return JointMixedStrategy.from_matrix(out, game.action_counts, check=False)


_STATUS_TEXT = {
    _kernels.STATUS_NOT_ADMISSIBLE: "selected action failed eps-best-response verification",
    _kernels.STATUS_CENTROID_DRIFT: "incremental centroid drifted from centroid(q)",
    _kernels.STATUS_LEFT_SIMPLEX: "empirical distribution left the simplex",
}


class _Runner:
    """Mutable working arrays for one process; advanced in place by the kernel."""

    def __init__(self, game, part, state, gamma_s, eps_s, mode, rng, centroid_belief):
        self.game = game
        self.class_of = part.class_index(game.n)
        self.n_classes = part.m
        self.q = _padded(game, state.q)
        self.qbar = _padded(game, state.q_bar)
        self.action = _padded(game, state.last_action)
        self.t = state.t
        self.gamma_s = gamma_s
        self.eps_s = eps_s
        self.mode = mode
        self.rng = rng
        self.centroid_belief = centroid_belief
        self.w = np.nan
        self.max_drop = -np.inf
        self.max_drift = 0.0

    def advance(self, steps: int) -> None:
        ts = np.arange(self.t, self.t + steps)
        gammas = np.ascontiguousarray(self.gamma_s.values(ts), dtype=np.float64)
        epsilons = np.ascontiguousarray(self.eps_s.values(ts), dtype=np.float64)
        uniforms = _draw_uniforms(self.mode, self.rng, self.game.n, steps)
        status, done, drop, self.w, drift = _kernels.advance(
            self.game._flat, self.game._shape, self.class_of, self.n_classes,
            self.q, self.qbar, self.action, gammas, epsilons, uniforms,
            self.mode.code, self.centroid_belief, SELECTION_TIE_TOLERANCE,
            ADMISSIBILITY_SLACK, CENTROID_DRIFT_TOLERANCE, SIMPLEX_NEG_TOLERANCE, self.w)
        self.t += done
        self.max_drop = max(self.max_drop, drop)
        self.max_drift = max(self.max_drift, drift)
        if status != _kernels.STATUS_OK:
            raise InternalConsistencyError(f"at t={self.t}: {_STATUS_TEXT[status]}")

    def joint(self, mat) -> JointMixedStrategy:
        return JointMixedStrategy.from_matrix(mat.copy(), self.game.action_counts, check=False)

    def state(self) -> ProcessState:
        return ProcessState(self.t, self.joint(self.q), self.joint(self.qbar), self.joint(self.action))


def _step(game, part, state, gamma_s, eps_s, mode, rng, centroid_belief) -> ProcessState:
    check_conforms(game, state.q)
    runner = _Runner(game, part, state, gamma_s, eps_s, mode, rng, centroid_belief)
    runner.advance(1)
    return runner.state()


def ecfp_step(game: Game, part: Partition, state: ProcessState, gamma_s, eps_s: EpsilonSchedule,
              mode: SelectionMode, rng=None) -> ProcessState:
    """One ECFP iteration: respond to the class centroids, then average in."""
    return _step(game, part, state, gamma_s, eps_s, mode, rng, True)


def fp_step(game: Game, state: ProcessState, gamma_s, eps_s: EpsilonSchedule,
            mode: SelectionMode, rng=None, part: Partition | None = None) -> ProcessState:
    """One FP iteration: respond to each opponent's own empirical distribution.

    ``part`` only determines how ``q_bar`` is maintained; by default every
    player is its own class, so ``q_bar`` equals ``q``.
    """
    part = Partition.singletons(game.n) if part is None else part
    return _step(game, part, state, gamma_s, eps_s, mode, rng, False)


def euler_flow_step(game: Game, part: Partition, state: ProcessState, h: float) -> ProcessState:
    """Explicit Euler step of dq/dt in BR(qbar) - q with exact responses."""
    if not 0.0 < h <= 1.0:
        raise InvalidArgumentError(f"Euler step h must lie in (0, 1], got {h}")
    return _step(game, part, state, ConstantStep(h), EpsilonSchedule.zero(),
                 SelectionMode("exact"), None, True)


def lyapunov_slack(game: Game) -> float:
    """Default K in the per-step bound U(qbar) drop <= K * h**2."""
    return game.n ** 2 * game.utility_range


def record_for(game: Game, part: Partition, t: int, q: JointMixedStrategy, q_bar: JointMixedStrategy,
               gamma: float, epsilon: float) -> TraceRecord:
    pay = payoff_matrix(game, q_bar)
    v = float(np.mean([q[i] @ pay[i, :m] for i, m in enumerate(game.action_counts)]))
    return TraceRecord(
        t=int(t),
        gamma=float(gamma),
        epsilon=float(epsilon),
        ne_gap=ne_gap(game, q),
        mce_gap=mce_gap(game, part, q),
        sne_gap=sne_gap(game, part, q_bar),
        lyapunov_w=mixed_utility(game, q_bar),
        lyapunov_v=v,
    )


def _resolve(process, gamma_s, eps_s, mode, h):
    """Fill in default schedules; the Euler flow fixes its own."""
    if process not in PROCESSES:
        raise InvalidArgumentError(f"unknown process {process!r}; use one of {PROCESSES}")
    mode = SelectionMode() if mode is None else mode
    if process == "euler":
        if not 0.0 < h <= 1.0:
            raise InvalidArgumentError(f"Euler step h must lie in (0, 1], got {h}")
        return ConstantStep(h), EpsilonSchedule.zero(), SelectionMode("exact", mode.seed)
    gamma_s = StepSizeSchedule.classical() if gamma_s is None else gamma_s
    eps_s = EpsilonSchedule.zero() if eps_s is None else eps_s
    return gamma_s, eps_s, mode


@dataclass(frozen=True)
class Path:
    """Full state history; row k holds the padded state at t = k + 1."""

    q: np.ndarray
    q_bar: np.ndarray
    action: np.ndarray


def trajectory(game: Game, part: Partition, process: str = "ecfp", *,
               gamma_s=None, eps_s: EpsilonSchedule | None = None,
               mode: SelectionMode | None = None, T: int = 1000, h: float = 1e-3,
               a1: JointMixedStrategy | None = None) -> Path:
    """Run like ``simulate`` but keep every state instead of gap records.

    Uses the same kernel and random streams, so the states agree bit for bit
    with those reached by ``simulate`` and by repeated single steps.
    """
    if T < 1:
        raise InvalidArgumentError("T must be >= 1")
    gamma_s, eps_s, mode = _resolve(process, gamma_s, eps_s, mode, h)
    runner = _Runner(game, part, initial_state(game, part, a1), gamma_s, eps_s, mode,
                     player_rngs(mode.seed, game.n), centroid_belief=process != "fp")
    shape = (T, game.n, game.max_actions)
    q, q_bar, action = np.empty(shape), np.empty(shape), np.empty(shape)
    for k in range(T):
        if k:
            runner.advance(1)
        q[k], q_bar[k], action[k] = runner.q, runner.qbar, runner.action
    return Path(q, q_bar, action)


def simulate(game: Game, part: Partition, process: str = "ecfp", *,
             gamma_s=None, eps_s: EpsilonSchedule | None = None,
             mode: SelectionMode | None = None, T: int = 1000, record_every: int = 1,
             h: float = 1e-3, a1: JointMixedStrategy | None = None) -> Trace:
    """Run ``process`` for iterations t = 1..T and record every ``record_every``-th state.

    The first and the final state are always recorded. If an invariant check
    fails, the run stops and the returned trace carries the error text.
    """
    if T < 1 or record_every < 1:
        raise InvalidArgumentError("T and record_every must be >= 1")
    gamma_s, eps_s, mode = _resolve(process, gamma_s, eps_s, mode, h)
    runner = _Runner(game, part, initial_state(game, part, a1), gamma_s, eps_s, mode,
                     player_rngs(mode.seed, game.n), centroid_belief=process != "fp")
    trace = Trace()

    def record():
        t = runner.t
        trace.records.append(record_for(
            game, part, t, runner.joint(runner.q), runner.joint(runner.qbar),
            gamma_at(gamma_s, t), epsilon_at(eps_s, t)))

    record()
    try:
        while runner.t < T:
            steps = min(record_every, T - runner.t)
            runner.advance(steps)
            record()
    except InternalConsistencyError as exc:
        log.error("run aborted: %s", exc)
        trace.error = str(exc)
    if process != "fp":
        trace.max_lyapunov_drop = float(runner.max_drop) if np.isfinite(runner.max_drop) else None
    trace.max_centroid_drift = float(runner.max_drift)
    return trace


def run_process(config) -> Trace:
    """Execute an experiment described by a loaded ``ExperimentConfig``."""
    game, part = config.game, config.partition
    a1 = initial_action(game, config.initial_action, config.selection.seed)
    return simulate(game, part, config.process, gamma_s=config.gamma, eps_s=config.epsilon,
                    mode=config.selection, T=config.T, record_every=config.record_every,
                    h=config.euler_h, a1=a1)
