"""Experiment harness: configuration, generators, oracles, summaries and the CLI."""

from ecfp.harness.config import ExperimentConfig, config_from_dict, config_to_dict, load_config, save_config
from ecfp.harness.generators import GeneratorSpec, generate_game
from ecfp.harness.oracles import brute_force_mixed_utility
from ecfp.harness.summary import ConvergenceReport, summarize
from ecfp.trace import Trace, TraceRecord, emit_trace, read_trace

__all__ = [
    "ExperimentConfig", "config_from_dict", "config_to_dict", "load_config", "save_config",
    "GeneratorSpec", "generate_game", "brute_force_mixed_utility",
    "ConvergenceReport", "summarize", "Trace", "TraceRecord", "emit_trace", "read_trace",
]
