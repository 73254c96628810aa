import json
import math

import numpy as np
import pytest

from conftest import MATCHING, random_counts, random_game, random_joint
from ecfp.dynamics import simulate
from ecfp.equilibrium import best_response_value
from ecfp.errors import ConfigError, InvalidArgumentError, ResourceError
from ecfp.game import Game, mixed_utility
from ecfp.harness.cli import main
from ecfp.harness.config import config_from_dict, config_to_dict, load_config, save_config
from ecfp.harness.generators import GeneratorSpec, generate_game
from ecfp.harness.oracles import brute_force_best_response_value, brute_force_mixed_utility
from ecfp.harness.summary import summarize
from ecfp.partition import Partition, validate_partition
from ecfp.trace import COLUMNS, Trace, TraceRecord, emit_trace, read_trace

INLINE = {"players": 2, "actions": [2, 2], "utility": [1.0, 0.0, 0.0, 1.0]}


# ---- oracles ---------------------------------------------------------------

def test_oracle_examples(matching):
    assert brute_force_mixed_utility(matching, [[1, 0], [1, 0]]) == 1.0
    assert brute_force_mixed_utility(matching, [[0.5, 0.5], [0.5, 0.5]]) == 0.5
    zero = Game([2, 3, 2], np.zeros(12))
    assert brute_force_mixed_utility(zero, [[0.3, 0.7], [0.2, 0.2, 0.6], [1, 0]]) == 0.0


def test_oracle_pure_profiles():
    rng = np.random.default_rng(0)
    game = random_game(rng, [2, 3])
    for a in range(2):
        for b in range(3):
            assert brute_force_mixed_utility(game, [np.eye(2)[a], np.eye(3)[b]]) == game.utility[a, b]


def test_oracle_agreement():
    rng = np.random.default_rng(10)
    for _ in range(500):
        counts = random_counts(rng)
        game = random_game(rng, counts)
        p = random_joint(rng, counts)
        fast = mixed_utility(game, p)
        slow = brute_force_mixed_utility(game, p.strategies)
        assert abs(fast - slow) <= 1e-12 * max(abs(slow), np.abs(game.utility).max())
        i = int(rng.integers(len(counts)))
        assert best_response_value(game, i, p) == brute_force_best_response_value(game, i, p.strategies)


# ---- generators ------------------------------------------------------------

def test_symmetric_two_player():
    game, part = generate_game(GeneratorSpec("symmetric_classes", (2, 2), (2,), seed=3))
    u = game.utility
    assert u[0, 1] == u[1, 0]
    assert part.classes == ((0, 1),)


def test_random_identical_singletons_valid():
    for seed in range(20):
        game, part = generate_game(GeneratorSpec("random_identical", (2, 3, 2), seed=seed))
        assert part == Partition.singletons(3)
        assert validate_partition(game, part).valid
        assert game.utility.min() >= 0 and game.utility.max() < 1


def test_symmetric_four_players_two_classes():
    for seed in range(100):
        game, part = generate_game(GeneratorSpec("symmetric_classes", (3, 3, 2, 2), (2, 2), seed=seed))
        assert validate_partition(game, part).valid


def test_generator_deterministic_and_seed_sensitive():
    spec = GeneratorSpec("symmetric_classes", (2, 2, 2), (3,), seed=5)
    assert generate_game(spec)[0] == generate_game(spec)[0]
    other = GeneratorSpec("symmetric_classes", (2, 2, 2), (3,), seed=6)
    assert generate_game(spec)[0] != generate_game(other)[0]


def test_generator_spec_validation():
    with pytest.raises(InvalidArgumentError):
        GeneratorSpec("symmetric_classes", (2, 3), (2,))
    with pytest.raises(InvalidArgumentError):
        GeneratorSpec("random_identical", (2, 2), (2,))
    with pytest.raises(InvalidArgumentError):
        GeneratorSpec("nope", (2, 2))
    with pytest.raises(InvalidArgumentError):
        GeneratorSpec("symmetric_classes", (2, 2, 2), (2,))
    with pytest.raises(ResourceError):
        generate_game(GeneratorSpec("random_identical", (10, 10, 10)), size_cap=100)


# ---- traces ----------------------------------------------------------------

def _trace():
    game, part = generate_game(GeneratorSpec("symmetric_classes", (2, 2, 3, 3), (2, 2), seed=2))
    return simulate(game, part, T=300, record_every=7)


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_trace_round_trip(tmp_path, fmt):
    tr = _trace()
    path = tmp_path / f"t.{fmt}"
    emit_trace(tr, path, fmt)
    back = read_trace(path, fmt)
    assert back.records == tr.records
    assert back.error is None


def test_csv_header_and_digits(tmp_path):
    path = tmp_path / "t.csv"
    emit_trace(_trace(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,gamma,epsilon,ne_gap,mce_gap,sne_gap,lyapunov_w,lyapunov_v"
    assert lines[1].split(",")[1] == "0.5"
    emit_trace(Trace(), path)
    assert path.read_text() == ",".join(COLUMNS) + "\n"


def test_trace_files_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_trace(_trace(), a)
    emit_trace(_trace(), b)
    assert a.read_bytes() == b.read_bytes()


def test_error_marker(tmp_path):
    tr = Trace(records=[TraceRecord(1, 0.5, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0)], error="boom")
    path = tmp_path / "t.csv"
    emit_trace(tr, path)
    assert read_trace(path).error == "boom"
    emit_trace(Trace(records=tr.records), path)
    assert read_trace(path).error is None


def test_unknown_format(tmp_path):
    with pytest.raises(InvalidArgumentError):
        emit_trace(Trace(), tmp_path / "x", "xml")


# ---- summary ---------------------------------------------------------------

def test_summary_single_record():
    rec = TraceRecord(1, 0.5, 0.0, 0.3, 0.2, 0.1, 0.4, 0.4)
    rep = summarize(Trace(records=[rec]))
    assert (rep.final_ne_gap, rep.final_mce_gap, rep.final_sne_gap) == (0.3, 0.2, 0.1)
    assert (rep.min_ne_gap, rep.min_mce_gap, rep.min_sne_gap) == (0.3, 0.2, 0.1)
    assert rep.final_t == 1


def test_summary_absorbing_run():
    game = Game([2, 2], MATCHING)
    tr = simulate(game, Partition([[0, 1]]), T=100, record_every=10)
    rep = summarize(tr)
    assert rep.final_ne_gap == rep.final_mce_gap == rep.final_sne_gap == 0.0
    assert rep.converged and rep.first_crossing["mce_gap"] == 1


def test_summary_thresholds():
    recs = [TraceRecord(t, 0.1, 0.0, g, g, g, 0.0, 0.0) for t, g in ((1, 0.9), (2, 0.5), (3, 0.7))]
    rep = summarize(Trace(records=recs), {"mce_gap": 0.6, "sne_gap": 0.6})
    assert rep.first_crossing["mce_gap"] == 2 and rep.min_mce_gap == 0.5 and rep.final_mce_gap == 0.7
    assert rep.converged
    assert summarize(Trace(records=recs), {"mce_gap": 2.0, "sne_gap": 2.0}).converged
    assert not summarize(Trace(records=recs)).converged
    with pytest.raises(InvalidArgumentError):
        summarize(Trace())


# ---- config ----------------------------------------------------------------

def test_minimal_config_defaults():
    cfg = config_from_dict({"game": {"inline": INLINE}}, env={})
    assert cfg.process == "ecfp" and cfg.T == 1000 and cfg.record_every == 10
    assert cfg.gamma.family == "classical" and cfg.epsilon.family == "zero"
    assert cfg.selection.variant == "exact" and cfg.selection.seed == 0
    assert cfg.partition == Partition.singletons(2)
    assert cfg.output_path is None


def test_config_rejects_bad_rho():
    data = {"game": {"inline": INLINE}, "schedules": {"gamma": {"family": "power", "rho": 1.5}}}
    with pytest.raises(ConfigError) as exc:
        config_from_dict(data, env={})
    assert any(path == "schedules.gamma.rho" for path, _ in exc.value.errors)


def test_config_rejects_overlap():
    data = {"game": {"inline": INLINE}, "partition": {"classes": [[0, 1], [1]]}}
    with pytest.raises(ConfigError) as exc:
        config_from_dict(data, env={})
    assert any("condition (i)" in msg for _, msg in exc.value.errors)


def test_config_rejects_asymmetric_class():
    inline = {"players": 2, "actions": [2, 2], "utility": [0.0, 1.0, 0.5, 0.0]}
    with pytest.raises(ConfigError) as exc:
        config_from_dict({"game": {"inline": inline}, "partition": {"classes": [[0, 1]]}}, env={})
    assert any("condition (iv)" in msg for _, msg in exc.value.errors)
    cfg = config_from_dict({"game": {"inline": inline}, "partition": {"classes": [[0, 1]]},
                            "partition_tolerance": 0.6}, env={})
    assert cfg.partition.classes == ((0, 1),)


def test_config_collects_all_errors():
    data = {"game": {"inline": INLINE}, "T": 0, "record_every": -1, "bogus": 1,
            "selection": {"mode": "greedy"}}
    with pytest.raises(ConfigError) as exc:
        config_from_dict(data, env={})
    paths = {p for p, _ in exc.value.errors}
    assert {"T", "record_every", "", "selection.mode"} <= paths


def test_config_missing_file(tmp_path):
    with pytest.raises(ConfigError) as exc:
        config_from_dict({"game": {"file": "nope.json"}}, base_dir=tmp_path, env={})
    assert exc.value.errors[0][0] == "game.file"


def test_malformed_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="malformed"):
        load_config(path, env={})


def test_seed_env_override():
    cfg = config_from_dict({"game": {"inline": INLINE}, "selection": {"seed": 3}}, env={"ECFP_SEED": "99"})
    assert cfg.selection.seed == 99


def test_config_round_trip(tmp_path):
    Game([2, 2], MATCHING).save(tmp_path / "g.json")
    sources = [
        {"inline": INLINE},
        {"file": "g.json"},
        {"generator": {"kind": "symmetric_classes", "actions": [2, 2, 3], "class_sizes": [2, 1], "seed": 4}},
    ]
    for src in sources:
        data = {
            "game": src,
            "process": "fp",
            "schedules": {"gamma": {"family": "power", "rho": 0.7, "t0": 1.0},
                          "epsilon": {"family": "power", "c": 1.0, "beta": 1.0}},
            "selection": {"mode": "uniform_eps", "seed": 8},
            "T": 123,
            "record_every": 4,
            "output": {"path": "out.json", "format": "json"},
        }
        cfg = config_from_dict(data, base_dir=tmp_path, env={})
        save_config(cfg, tmp_path / "cfg.json")
        again = load_config(tmp_path / "cfg.json", env={})
        assert again == cfg
        assert config_to_dict(again) == config_to_dict(cfg)


# ---- CLI -------------------------------------------------------------------

def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_cli_validate_and_run(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", {
        "game": {"generator": {"kind": "symmetric_classes", "actions": [2, 2, 2], "class_sizes": [3], "seed": 1}},
        "T": 200, "record_every": 50, "output": {"path": "trace.csv"}})
    assert main(["validate", cfg]) == 0
    assert main(["run", cfg]) == 0
    out = json.loads(capsys.readouterr().out.split("\n", 1)[1])
    assert out["final_t"] == 200
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert [int(line.split(",")[0]) for line in lines[1:]] == [1, 51, 101, 151, 200]


def test_cli_run_euler_reports_bound(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", {"game": {"inline": INLINE}, "partition": {"classes": [[0, 1]]},
                                      "process": "euler", "euler_h": 0.01, "T": 100})
    assert main(["run", cfg, "-o", str(tmp_path / "e.json"), "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["max_lyapunov_drop"] <= out["lyapunov_bound"]
    assert len(json.loads((tmp_path / "e.json").read_text())) == 11


def test_cli_validation_failure_exit_code(tmp_path, capsys):
    bad = _write(tmp_path / "c.json", {"game": {"inline": INLINE},
                                      "schedules": {"gamma": {"family": "power", "rho": 1.5}}})
    assert main(["validate", bad]) == 1
    assert "schedules.gamma.rho" in capsys.readouterr().err


def test_cli_runtime_error_exit_code(tmp_path, monkeypatch):
    import ecfp.dynamics as dyn
    cfg = _write(tmp_path / "c.json", {"game": {"inline": INLINE}, "T": 50})
    monkeypatch.setattr(dyn, "CENTROID_DRIFT_TOLERANCE", -1.0)
    assert main(["run", cfg, "-o", str(tmp_path / "t.csv")]) == 2
    assert (tmp_path / "t.csv.error").exists()


def test_cli_gaps(tmp_path, capsys):
    g = tmp_path / "g.json"
    Game([2, 2], MATCHING).save(g)
    part = _write(tmp_path / "p.json", {"classes": [[0, 1]]})
    strat = _write(tmp_path / "s.json", {"strategies": [[1, 0], [0, 1]]})
    assert main(["gaps", str(g), part, strat]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"ne_gap": 1.0, "mce_gap": 0.0, "sne_gap": 1.0, "sne_gap_of_centroid": 0.0}
    bad = _write(tmp_path / "b.json", {"strategies": [[1, 0], [0, 1, 0]]})
    assert main(["gaps", str(g), part, bad]) == 1


def test_cli_generate(tmp_path):
    spec = _write(tmp_path / "spec.json", {"kind": "symmetric_classes", "players": 4,
                                          "actions": [2, 2, 3, 3], "class_sizes": [2, 2], "seed": 3})
    out, pout = tmp_path / "g.json", tmp_path / "p.json"
    assert main(["generate", spec, "-o", str(out), "--partition-out", str(pout)]) == 0
    game = Game.load(out)
    part = Partition.from_dict(json.loads(pout.read_text()))
    assert validate_partition(game, part).valid
    assert len(game.to_dict()["utility"]) == math.prod([2, 2, 3, 3])


def test_cli_lemmas_on_given_game(tmp_path, capsys):
    g = tmp_path / "g.json"
    generate_game(GeneratorSpec("symmetric_classes", (2, 2, 2), (3,), seed=0))[0].save(g)
    part = _write(tmp_path / "p.json", {"classes": [[0, 1, 2]]})
    assert main(["lemmas", str(g), part, "--trials", "50", "--trajectories", "2", "--steps", "200"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 3
    asym = tmp_path / "a.json"
    Game([2, 2], [[0.0, 1.0], [0.5, 0.0]]).save(asym)
    part2 = _write(tmp_path / "p2.json", {"classes": [[0, 1]]})
    assert main(["lemmas", str(asym), part2, "--trials", "5"]) == 1
