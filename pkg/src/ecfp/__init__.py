"""Fictitious play and empirical centroid fictitious play in identical-interest games."""

from ecfp.dynamics import (
    EpsilonSchedule, ProcessState, SelectionMode, StepSizeSchedule, ecfp_step, euler_flow_step,
    fp_step, run_process, simulate, trajectory,
)
from ecfp.equilibrium import best_response_value, epsilon_br_actions, mce_gap, ne_gap, sne_gap
from ecfp.game import Game, JointMixedStrategy, mixed_utility, payoff_vector
from ecfp.partition import Partition, centroid, validate_partition

__version__ = "0.1.0"

__all__ = [
    "EpsilonSchedule", "ProcessState", "SelectionMode", "StepSizeSchedule", "ecfp_step",
    "euler_flow_step", "fp_step", "run_process", "simulate", "trajectory",
    "best_response_value", "epsilon_br_actions", "mce_gap", "ne_gap", "sne_gap",
    "Game", "JointMixedStrategy", "mixed_utility", "payoff_vector",
    "Partition", "centroid", "validate_partition",
]
