"""Command-line interface.

Exit codes: 0 success, 1 validation or verification failure, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ecfp.dynamics import lyapunov_slack, run_process
from ecfp.equilibrium import mce_gap, ne_gap, sne_gap
from ecfp.errors import ConfigError, InternalConsistencyError, InvalidArgumentError, ResourceError
from ecfp.game import Game, JointMixedStrategy
from ecfp.harness.config import load_config
from ecfp.harness.generators import GeneratorSpec, generate_game
from ecfp.harness.lemmas import run_lemma_suite
from ecfp.harness.summary import summarize
from ecfp.partition import Partition, centroid, validate_partition
from ecfp.trace import emit_trace

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: malformed JSON: {exc}") from None


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    print(f"{args.config}: valid ({cfg.process}, T={cfg.T}, {cfg.game.n} players, "
          f"{cfg.partition.m} classes)")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.output:
        cfg.output_path = args.output
    if args.format:
        cfg.output_format = args.format
    trace = run_process(cfg)
    if cfg.output_path:
        emit_trace(trace, cfg.output_path, cfg.output_format)
    report = summarize(trace, cfg.thresholds).to_dict()
    if cfg.process == "euler":
        K = cfg.lyapunov_K if cfg.lyapunov_K is not None else lyapunov_slack(cfg.game)
        report["max_lyapunov_drop"] = trace.max_lyapunov_drop
        report["lyapunov_bound"] = K * cfg.euler_h ** 2
    print(json.dumps(report, indent=2))
    if trace.error:
        print(f"run aborted: {trace.error}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_gaps(args) -> int:
    game = Game.load(args.game)
    part = Partition.from_dict(_read_json(args.partition))
    data = _read_json(args.strategy)
    if not isinstance(data, dict) or set(data) != {"strategies"}:
        raise InvalidArgumentError(f"{args.strategy}: expected an object with the single field 'strategies'")
    p = JointMixedStrategy(data["strategies"])
    out = {
        "ne_gap": ne_gap(game, p),
        "mce_gap": mce_gap(game, part, p),
        "sne_gap": sne_gap(game, part, p),
        "sne_gap_of_centroid": sne_gap(game, part, centroid(part, p)),
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_lemmas(args) -> int:
    game = part = None
    if args.game:
        if not args.partition:
            raise InvalidArgumentError("a partition file is required together with a game")
        game = Game.load(args.game)
        part = Partition.from_dict(_read_json(args.partition))
        report = validate_partition(game, part)
        if not report.valid:
            raise InvalidArgumentError(f"partition is not permutation invariant: {report}")
    rep = run_lemma_suite(args.trials, args.seed, game, part, args.trajectories, args.steps)
    for line in rep.lines():
        print(line)
    for f in rep.failures[:20]:
        print("  " + f)
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_generate(args) -> int:
    spec = GeneratorSpec.from_dict(_read_json(args.spec))
    game, part = generate_game(spec)
    game.save(args.output)
    if args.partition_out:
        Path(args.partition_out).write_text(json.dumps(part.to_dict()) + "\n")
    print(f"wrote {args.output} ({game.n} players, {len(game.utility.flat)} utility entries)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ecfp", description="Empirical centroid fictitious play simulator")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an experiment configuration")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run an experiment and write its trace")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="trace path (overrides the config)")
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gaps", help="equilibrium gaps of a joint strategy")
    p.add_argument("game")
    p.add_argument("partition")
    p.add_argument("strategy")
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("lemmas", help="randomized lemma checks")
    p.add_argument("game", nargs="?", help="game file; random symmetric games if omitted")
    p.add_argument("partition", nargs="?")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--trajectories", type=int, default=8)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("generate", help="generate a game from a generator spec")
    p.add_argument("spec")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--partition-out")
    p.set_defaults(func=cmd_generate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    except (InvalidArgumentError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InternalConsistencyError, ResourceError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
