"""Randomized checks of the three centroid lemmas.

1. rearrangement: (1/n) sum_i U(p_i, pbar_{-i}) == U(pbar) up to 1e-10;
2. centroid best response: p in BR^eps(qbar) implies pbar in BR^eps(qbar);
3. centroid recursion: along ECFP trajectories the incrementally updated
   qbar(t) stays within 1e-9 of centroid(q(t)), and the class-averaged
   action is itself an eps_t-best response to qbar(t).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ecfp.dynamics import (
    ADMISSIBILITY_SLACK, EpsilonSchedule, SelectionMode, StepSizeSchedule, ecfp_step,
    epsilon_at, initial_action, initial_state, player_rngs,
)
from ecfp.game import Game, JointMixedStrategy, payoff_matrix
from ecfp.harness.generators import GeneratorSpec, generate_game
from ecfp.partition import Partition, centroid, check_rearrangement, permutation_br_status

REARRANGEMENT_TOL = 1e-10
DRIFT_TOL = 1e-9


@dataclass
class LemmaReport:
    trials: int = 0
    rearrangement_max: float = 0.0
    rearrangement_failures: int = 0
    br_established: int = 0
    br_failures: int = 0
    trajectories: int = 0
    steps: int = 0
    drift_max: float = 0.0
    recursion_failures: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> dict:
        return {
            "rearrangement": self.rearrangement_failures == 0,
            "centroid_br": self.br_failures == 0 and self.br_established > 0,
            "centroid_recursion": self.recursion_failures == 0 and self.drift_max <= DRIFT_TOL,
        }

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def lines(self) -> list:
        p = self.passed
        tag = {True: "PASS", False: "FAIL"}
        return [
            f"{tag[p['rearrangement']]} rearrangement identity: {self.trials} trials, "
            f"max residual {self.rearrangement_max:.3e} (tol {REARRANGEMENT_TOL:g})",
            f"{tag[p['centroid_br']]} centroid best response: "
            f"{self.br_established}/{self.trials} trials with hypothesis established, {self.br_failures} failures",
            f"{tag[p['centroid_recursion']]} centroid recursion: {self.trajectories} trajectories x "
            f"{self.steps} steps, max drift {self.drift_max:.3e} (tol {DRIFT_TOL:g})",
        ]


def random_symmetric_spec(rng: np.random.Generator, max_players: int = 5, max_actions: int = 4) -> GeneratorSpec:
    """A symmetric_classes spec with 2..max_players players in random classes."""
    n = int(rng.integers(2, max_players + 1))
    sizes = []
    left = n
    while left:
        s = int(rng.integers(1, left + 1))
        sizes.append(s)
        left -= s
    counts = []
    for s in sizes:
        counts.extend([int(rng.integers(1, max_actions + 1))] * s)
    return GeneratorSpec("symmetric_classes", tuple(counts), tuple(sizes), int(rng.integers(2**31)))


def random_strategy(rng: np.random.Generator, counts) -> JointMixedStrategy:
    """Dirichlet strategies, with some players pushed to vertices or faces."""
    rows = []
    for m in counts:
        kind = rng.integers(4)
        if kind == 0:
            v = np.zeros(m)
            v[rng.integers(m)] = 1.0
        elif kind == 1 and m > 1:
            v = rng.dirichlet(np.ones(m)) * (rng.random(m) < 0.5)
            v = v / v.sum() if v.sum() > 0 else np.eye(m)[0]
        else:
            v = rng.dirichlet(np.full(m, 0.5))
        rows.append(v)
    return JointMixedStrategy(rows)


def sample_eps_br(rng: np.random.Generator, game: Game, qbar: JointMixedStrategy, eps: float,
                  tries: int = 20) -> JointMixedStrategy:
    """Draw p with every p_i in BR_i^eps(qbar_{-i}).

    Dirichlet candidates are accepted when they clear the bound; otherwise
    a random mixture of eps-best vertices is used, which always qualifies.
    """
    pay = payoff_matrix(game, qbar)
    rows = []
    for i, m in enumerate(game.action_counts):
        v = pay[i, :m]
        floor = v.max() - eps
        for _ in range(tries):
            cand = rng.dirichlet(np.ones(m))
            if cand @ v >= floor:
                break
        else:
            good = np.flatnonzero(v >= floor)
            cand = np.zeros(m)
            cand[good] = rng.dirichlet(np.ones(len(good)))
        rows.append(cand)
    return JointMixedStrategy(rows)


def _one_trial(rng, report, game, part):
    p = random_strategy(rng, game.action_counts)
    res = check_rearrangement(game, part, p)
    report.rearrangement_max = max(report.rearrangement_max, res)
    if not res <= REARRANGEMENT_TOL:
        report.rearrangement_failures += 1
        report.failures.append(f"rearrangement residual {res:.3e} on {game!r}")

    q = random_strategy(rng, game.action_counts)
    eps = float(rng.choice([0.0, 1e-3, 0.05, rng.random() * game.utility_range]))
    p = sample_eps_br(rng, game, centroid(part, q), eps)
    hyp, concl = permutation_br_status(game, part, p, q, eps)
    if hyp:
        report.br_established += 1
        if not concl:
            report.br_failures += 1
            report.failures.append(f"centroid best response fails with eps={eps} on {game!r}")


_TRAJECTORY_SETUPS = (
    (StepSizeSchedule.classical(), EpsilonSchedule.zero(), "exact"),
    (StepSizeSchedule.power(0.7, 1.0), EpsilonSchedule.zero(), "exact"),
    (StepSizeSchedule.classical(), EpsilonSchedule.power(1.0, 1.0), "uniform_eps"),
    (StepSizeSchedule.power(0.6, 1.0), EpsilonSchedule.power(0.5, 0.5), "mixed_eps"),
)


def check_trajectory(game: Game, part: Partition, steps: int, setup: int, seed: int) -> tuple:
    """Run ECFP step by step; return ``(max_drift, failure text or None)``."""
    gamma_s, eps_s, variant = _TRAJECTORY_SETUPS[setup % len(_TRAJECTORY_SETUPS)]
    mode = SelectionMode(variant, seed)
    rngs = player_rngs(seed, game.n)
    state = initial_state(game, part, initial_action(game, "random", seed))
    worst = 0.0
    for _ in range(steps):
        eps = epsilon_at(eps_s, state.t)
        prev_bar = state.q_bar
        state = ecfp_step(game, part, state, gamma_s, eps_s, mode, rngs)
        drift = float(np.abs(centroid(part, state.q).matrix - state.q_bar.matrix).max())
        worst = max(worst, drift)
        abar = centroid(part, state.last_action)
        pay = payoff_matrix(game, prev_bar)
        for i, m in enumerate(game.action_counts):
            if abar[i] @ pay[i, :m] < pay[i, :m].max() - eps - ADMISSIBILITY_SLACK:
                return worst, f"class-averaged action not an eps-best response at t={state.t}"
        if drift > DRIFT_TOL:
            return worst, f"centroid drift {drift:.3e} at t={state.t}"
    return worst, None


def run_lemma_suite(trials: int = 1000, seed: int = 0, game: Game | None = None,
                    part: Partition | None = None, trajectories: int = 8,
                    steps: int = 10_000) -> LemmaReport:
    """Randomized lemma checks.

    With ``game`` and ``part`` given, strategies are drawn for that game;
    otherwise each trial draws a fresh symmetric_classes game (at most 5
    players and 4 actions each) with its own partition.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    report = LemmaReport(trials=trials, steps=steps)
    traj_games = []
    for _ in range(trials):
        if game is None:
            g, pt = generate_game(random_symmetric_spec(rng))
        else:
            g, pt = game, part
        _one_trial(rng, report, g, pt)
        if len(traj_games) < trajectories:
            traj_games.append((g, pt))
    for k, (g, pt) in enumerate(traj_games):
        drift, failure = check_trajectory(g, pt, steps, k, seed + k)
        report.trajectories += 1
        report.drift_max = max(report.drift_max, drift)
        if failure:
            report.recursion_failures += 1
            report.failures.append(f"centroid recursion: {failure} on {g!r}")
    return report
