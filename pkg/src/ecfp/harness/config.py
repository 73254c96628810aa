"""Experiment configuration: JSON schema, loading and emitting.

A configuration looks like::

    {
      "game": {"generator": {"kind": "symmetric_classes", "actions": [2, 2, 2],
                             "class_sizes": [3], "seed": 7}},
      "process": "ecfp",
      "schedules": {"gamma": {"family": "power", "rho": 0.7, "t0": 1},
                    "epsilon": {"family": "power", "c": 1.0, "beta": 1.0}},
      "selection": {"mode": "uniform_eps", "seed": 3},
      "T": 100000,
      "record_every": 100,
      "output": {"path": "trace.csv", "format": "csv"}
    }

``game`` holds exactly one of ``inline`` (a game object), ``file`` (path to
a game JSON file) or ``generator`` (a generator spec). Relative paths are
resolved against the directory of the configuration file. The environment
variable ``ECFP_SEED`` overrides ``selection.seed``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from ecfp.dynamics import PROCESSES, EpsilonSchedule, SelectionMode, StepSizeSchedule
from ecfp.errors import ConfigError, InvalidArgumentError, ResourceError
from ecfp.game import Game
from ecfp.harness.generators import KINDS, GeneratorSpec, generate_game
from ecfp.harness.summary import DEFAULT_THRESHOLDS
from ecfp.partition import Partition, validate_partition

SEED_ENV = "ECFP_SEED"

_NUM = {"type": "number"}
_COUNT_LIST = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["game"],
    "properties": {
        "game": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {
                "inline": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["players", "actions", "utility"],
                    "properties": {
                        "players": {"type": "integer", "minimum": 2},
                        "actions": _COUNT_LIST,
                        "utility": {"type": "array", "items": _NUM},
                    },
                },
                "file": {"type": "string"},
                "generator": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "actions"],
                    "properties": {
                        "kind": {"enum": list(KINDS)},
                        "players": {"type": "integer", "minimum": 2},
                        "actions": _COUNT_LIST,
                        "class_sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                        "seed": {"type": "integer", "minimum": 0},
                    },
                },
            },
        },
        "partition": {
            "type": "object",
            "additionalProperties": False,
            "required": ["classes"],
            "properties": {
                "classes": {
                    "type": "array",
                    "items": {"type": "array", "minItems": 1,
                              "items": {"type": "integer", "minimum": 0}},
                },
            },
        },
        "partition_tolerance": {"type": "number", "minimum": 0},
        "process": {"enum": list(PROCESSES)},
        "schedules": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gamma": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["family"],
                    "properties": {
                        "family": {"enum": ["classical", "power"]},
                        "rho": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                        "t0": {"type": "number", "minimum": 0},
                    },
                },
                "epsilon": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["family"],
                    "properties": {
                        "family": {"enum": ["zero", "power"]},
                        "c": {"type": "number", "minimum": 0},
                        "beta": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            },
        },
        "selection": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["exact", "uniform_eps", "mixed_eps"]},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "initial_action": {"enum": ["zero", "random"]},
        "T": {"type": "integer", "minimum": 1},
        "record_every": {"type": "integer", "minimum": 1},
        "euler_h": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "lyapunov_K": {"type": "number", "minimum": 0},
        "thresholds": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "number", "minimum": 0} for k in DEFAULT_THRESHOLDS},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "required": ["path"],
            "properties": {
                "path": {"type": "string"},
                "format": {"enum": ["csv", "json"]},
            },
        },
    },
}


@dataclass
class ExperimentConfig:
    game: Game
    game_source: dict
    partition: Partition
    partition_explicit: bool = False
    partition_tolerance: float = 0.0
    process: str = "ecfp"
    gamma: StepSizeSchedule = field(default_factory=StepSizeSchedule.classical)
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule.zero)
    selection: SelectionMode = field(default_factory=SelectionMode)
    initial_action: str = "zero"
    T: int = 1000
    record_every: int = 10
    euler_h: float = 1e-3
    lyapunov_K: float | None = None
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    output_path: str | None = None
    output_format: str = "csv"


def _path(err) -> str:
    return ".".join(str(p) for p in err.absolute_path)


def _resolve(base: Path, p: str) -> str:
    path = Path(p)
    return str(path if path.is_absolute() else (base / path).resolve())


def config_from_dict(data: dict, base_dir=".", env=None) -> ExperimentConfig:
    """Validate ``data`` and build the configuration, collecting every error."""
    env = os.environ if env is None else env
    base = Path(base_dir)
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = [(_path(e), e.message) for e in sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))]
    if errors:
        raise ConfigError(errors)

    errors = []
    sched = data.get("schedules", {})
    gamma_d = sched.get("gamma", {"family": "classical"})
    if gamma_d["family"] == "classical" and set(gamma_d) != {"family"}:
        errors.append(("schedules.gamma", "the classical schedule takes no parameters"))
    gamma = StepSizeSchedule(gamma_d["family"], gamma_d.get("rho", 1.0), gamma_d.get("t0", 0.0)) \
        if not errors else None
    eps_d = sched.get("epsilon", {"family": "zero"})
    if eps_d["family"] == "zero" and set(eps_d) != {"family"}:
        errors.append(("schedules.epsilon", "the zero schedule takes no parameters"))
    epsilon = EpsilonSchedule(eps_d["family"], eps_d.get("c", 1.0), eps_d.get("beta", 1.0))

    sel = data.get("selection", {})
    seed = sel.get("seed", 0)
    if env.get(SEED_ENV):
        try:
            seed = int(env[SEED_ENV])
        except ValueError:
            errors.append((SEED_ENV, f"not an integer: {env[SEED_ENV]!r}"))
    selection = SelectionMode(sel.get("mode", "exact"), seed)

    game, part = None, None
    src = dict(data["game"])
    try:
        if "inline" in src:
            game = Game.from_dict(src["inline"])
        elif "file" in src:
            src["file"] = _resolve(base, src["file"])
            if not Path(src["file"]).is_file():
                errors.append(("game.file", f"no such file: {src['file']}"))
            else:
                game = Game.load(src["file"])
        else:
            game, part = generate_game(GeneratorSpec.from_dict(src["generator"]))
    except (InvalidArgumentError, ResourceError, ValueError) as exc:
        errors.append(("game", str(exc)))

    explicit = "partition" in data
    tolerance = float(data.get("partition_tolerance", 0.0))
    if explicit:
        part = Partition.from_dict(data["partition"])
    if game is not None:
        if part is None:
            part = Partition.singletons(game.n)
        try:
            report = validate_partition(game, part, tolerance)
        except (InvalidArgumentError, ResourceError) as exc:
            errors.append(("partition.classes", str(exc)))
        else:
            for cond, witness in report.violations:
                errors.append(("partition.classes", f"condition ({cond}) violated: {witness}"))

    out = data.get("output")
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        game=game,
        game_source=src,
        partition=part,
        partition_explicit=explicit,
        partition_tolerance=tolerance,
        process=data.get("process", "ecfp"),
        gamma=gamma,
        epsilon=epsilon,
        selection=selection,
        initial_action=data.get("initial_action", "zero"),
        T=data.get("T", 1000),
        record_every=data.get("record_every", 10),
        euler_h=float(data.get("euler_h", 1e-3)),
        lyapunov_K=data.get("lyapunov_K"),
        thresholds={**DEFAULT_THRESHOLDS, **data.get("thresholds", {})},
        output_path=_resolve(base, out["path"]) if out else None,
        output_format=out.get("format", "csv") if out else "csv",
    )


def load_config(path, env=None) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([("", f"malformed JSON: {exc}")]) from None
    except OSError as exc:
        raise ConfigError([("", f"cannot read {path}: {exc}")]) from None
    if not isinstance(data, dict):
        raise ConfigError([("", "top level must be a JSON object")])
    return config_from_dict(data, base_dir=path.parent, env=env)


def config_to_dict(config: ExperimentConfig) -> dict:
    """Inverse of ``config_from_dict`` with all defaults written out."""
    if config.gamma.family == "classical":
        gamma = {"family": "classical"}
    else:
        gamma = {"family": "power", "rho": config.gamma.rho, "t0": config.gamma.t0}
    if config.epsilon.family == "zero":
        epsilon = {"family": "zero"}
    else:
        epsilon = {"family": "power", "c": config.epsilon.c, "beta": config.epsilon.beta}
    out = {
        "game": config.game_source,
        "partition_tolerance": config.partition_tolerance,
        "process": config.process,
        "schedules": {"gamma": gamma, "epsilon": epsilon},
        "selection": {"mode": config.selection.variant, "seed": config.selection.seed},
        "initial_action": config.initial_action,
        "T": config.T,
        "record_every": config.record_every,
        "euler_h": config.euler_h,
        "thresholds": dict(config.thresholds),
    }
    if config.partition_explicit:
        out["partition"] = config.partition.to_dict()
    if config.lyapunov_K is not None:
        out["lyapunov_K"] = config.lyapunov_K
    if config.output_path is not None:
        out["output"] = {"path": config.output_path, "format": config.output_format}
    return out


def save_config(config: ExperimentConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")
