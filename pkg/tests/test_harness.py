"""Harness: config validation, deterministic generation, sweeps, CLI contract."""

import json
import os
import subprocess
import sys

import pytest

from scoreclass import (build_strategy, generate, parse_config, run_experiment,
                        run_reproduction)
from scoreclass.appendix_a import APPENDIX_A_INSTANCE
from scoreclass.errors import ParameterError
from scoreclass.harness import (CSV_HEADER, bound_for, canonical_oracle,
                                records_to_csv)
from scoreclass.model import Instance, instance_to_dict

from conftest import assert_close


def config_dict(**overrides):
    base = {
        "n_range": [3, 6],
        "B_range": [2, 3],
        "cost_mode": {"kind": "UNIT"},
        "prob_mode": {"kind": "UNIFORM", "lo": 0.1, "hi": 0.9},
        "trials": 5,
        "seed": 7,
        "strategies": ["nonadaptive-rr"],
        "oracle": "ADAPTIVE",
    }
    base.update(overrides)
    return base


class TestConfigParsing:
    def test_valid(self):
        cfg = parse_config(config_dict())
        assert cfg.n_range == (3, 6)
        assert cfg.cost_mode == ("UNIT",)

    def test_rejections(self):
        bad_cases = [
            config_dict(extra=1),
            config_dict(n_range=[3]),
            config_dict(n_range=[6, 3]),
            config_dict(B_range=[1, 2]),
            config_dict(B_range=[2, 5]),  # 4 interior cutoffs but n may be 3
            config_dict(cost_mode={"kind": "UNIFORM_INT"}),
            config_dict(cost_mode={"kind": "UNIFORM_INT", "lo": 0, "hi": 3}),
            config_dict(cost_mode={"kind": "FREE"}),
            config_dict(prob_mode={"kind": "UNIFORM", "lo": 0.0, "hi": 0.9}),
            config_dict(prob_mode={"kind": "UNIFORM", "lo": 0.2, "hi": 1.0}),
            config_dict(trials=0),
            config_dict(seed=-1),
            config_dict(strategies=[]),
            config_dict(strategies=["mystery"]),
            config_dict(oracle="SOMETIMES"),
        ]
        missing = config_dict()
        del missing["seed"]
        bad_cases.append(missing)
        for obj in bad_cases:
            with pytest.raises(ParameterError):
                parse_config(obj)


class TestGenerate:
    def test_deterministic(self):
        cfg = parse_config(config_dict(trials=8))
        a = [(iid, instance_to_dict(inst)) for iid, inst in generate(cfg)]
        b = [(iid, instance_to_dict(inst)) for iid, inst in generate(cfg)]
        assert a == b

    def test_two_classes_only(self):
        cfg = parse_config(config_dict(B_range=[2, 2], trials=10))
        for _, inst in generate(cfg):
            assert inst.num_classes == 2

    def test_prob_bounds_respected(self):
        cfg = parse_config(config_dict(
            prob_mode={"kind": "UNIFORM", "lo": 0.01, "hi": 0.99}, trials=10))
        for _, inst in generate(cfg):
            assert all(0.01 <= p <= 0.99 for p in inst.probs)

    def test_cutoffs_shape(self):
        cfg = parse_config(config_dict(trials=10, B_range=[2, 3]))
        for _, inst in generate(cfg):
            cuts = inst.cutoffs
            assert cuts[0] == 0 and cuts[-1] == inst.n + 1
            assert all(1 <= a <= inst.n for a in cuts[1:-1])


class TestExperiment:
    def test_kofn_ratios_are_one(self):
        cfg = parse_config(config_dict(B_range=[2, 2], strategies=["kofn"],
                                       cost_mode={"kind": "UNIFORM_INT", "lo": 1, "hi": 9},
                                       trials=6))
        records = run_experiment(cfg)
        assert len(records) == 6
        for r in records:
            assert_close(r.ratio, 1.0)
            assert r.within_bound

    def test_unit_rr_bound_is_four(self):
        cfg = parse_config(config_dict(trials=4))
        for r in run_experiment(cfg):
            assert r.bound == 4.0
            assert r.within_bound

    def test_arbitrary_rr_uses_nonadaptive_two_b_minus_one(self):
        cfg = parse_config(config_dict(
            cost_mode={"kind": "UNIFORM_INT", "lo": 1, "hi": 9},
            oracle="BOTH", trials=4))
        for r in run_experiment(cfg):
            assert r.bound == 2.0 * (r.num_classes - 1)
            assert r.within_bound

    def test_csv_layout_and_determinism(self):
        cfg = parse_config(config_dict(trials=3, strategies=["nonadaptive-rr", "b-minus-1"]))
        records = run_experiment(cfg)
        text = records_to_csv(records)
        lines = text.strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 3 * 2
        # deterministic (instance_id, strategy) order and byte-stable output
        keys = [(ln.split(",")[0], ln.split(",")[1]) for ln in lines[1:]]
        assert keys == sorted(keys)
        assert records_to_csv(run_experiment(cfg)) == text

    def test_unknown_strategy_fails_before_compute(self):
        with pytest.raises(ParameterError):
            build_strategy("mystery", APPENDIX_A_INSTANCE)

    def test_uv_sweep_with_trr(self):
        cfg = parse_config(config_dict(B_range=[3, 3], n_range=[3, 8],
                                       strategies=["trr", "uv-adaptive"],
                                       trials=6))
        for _, inst in generate(cfg):
            assert inst.cutoffs == (0, 1, inst.n, inst.n + 1)
        records = run_experiment(cfg)
        phi = (1 + 5 ** 0.5) / 2
        for r in records:
            assert r.within_bound
            if r.strategy == "trr":
                assert r.bound == pytest.approx(phi)
                assert r.ratio <= phi + 1e-9
            else:
                assert_close(r.ratio, 1.0)

    def test_uv_strategies_need_uv_family(self):
        with pytest.raises(ParameterError):
            parse_config(config_dict(strategies=["trr"]))  # B_range is [2, 3]

    def test_bound_table(self):
        uv = Instance(n=4, costs=(1.0,) * 4, probs=(0.5,) * 4,
                      weights=(1,) * 4, cutoffs=(0, 1, 4, 5))
        assert bound_for("trr", "ADAPTIVE", uv) == pytest.approx((1 + 5 ** 0.5) / 2)
        assert bound_for("b-minus-1", "ADAPTIVE", uv) == 2.0
        assert canonical_oracle("nonadaptive-rr", uv) == "ADAPTIVE"
        priced = Instance(n=4, costs=(2.0, 1.0, 1.0, 1.0), probs=(0.5,) * 4,
                          weights=(1,) * 4, cutoffs=(0, 1, 4, 5))
        assert canonical_oracle("nonadaptive-rr", priced) == "NONADAPTIVE"
        with pytest.raises(ParameterError):
            bound_for("trr", "ADAPTIVE", priced)
        with pytest.raises(ParameterError):
            bound_for("nonadaptive-rr", "ADAPTIVE", priced)


class TestReproductionNegativeControl:
    def test_perturbed_instance_reports_mismatch(self):
        base = APPENDIX_A_INSTANCE
        perturbed = Instance(n=base.n, costs=base.costs,
                             probs=(0.1, 0.3, 0.5, 0.8),
                             weights=base.weights, cutoffs=base.cutoffs,
                             labels=base.labels)
        report = run_reproduction(perturbed)
        assert not report.passed
        failing = [c for c in report.checks if not c.ok]
        assert failing
        for c in failing:
            assert c.expected != c.computed


def run_cli(args, env_extra=None):
    env = os.environ.copy()
    env.setdefault("SCORECLASS_BACKEND", "numpy")  # keep subprocesses light
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run([sys.executable, "-m", "scoreclass.cli", *args],
                          capture_output=True, text=True, env=env)
    return proc


class TestCLI:
    def test_reproduce_passes(self):
        proc = run_cli(["reproduce-appendix-a"])
        assert proc.returncode == 0, proc.stderr
        assert "RESULT PASS" in proc.stdout

    def test_eval_and_determinism(self, tmp_path):
        inst_path = tmp_path / "inst.json"
        inst_path.write_text(json.dumps({
            "n": 3, "costs": [1, 1, 1], "probs": [0.9, 0.5, 0.1],
            "cutoffs": [0, 2, 4]}))
        first = run_cli(["eval", "--instance", str(inst_path),
                         "--strategy", "nonadaptive-rr", "--oracle"])
        assert first.returncode == 0, first.stderr
        payload = json.loads(first.stdout)
        assert payload["expected_cost"] == pytest.approx(2.82)
        assert payload["ratio"] >= 1.0
        second = run_cli(["eval", "--instance", str(inst_path),
                          "--strategy", "nonadaptive-rr", "--oracle"])
        assert second.stdout == first.stdout

    def test_gen_experiment_round_trip(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config_dict(trials=3)))
        out_dir = tmp_path / "instances"
        proc = run_cli(["gen", "--config", str(cfg_path), "--out-dir", str(out_dir)])
        assert proc.returncode == 0, proc.stderr
        files = sorted(os.listdir(out_dir))
        assert files == [f"instance_t{i:05d}.json" for i in range(3)]
        csv_path = tmp_path / "out.csv"
        proc = run_cli(["experiment", "--config", str(cfg_path),
                        "--out", str(csv_path)])
        assert proc.returncode == 0, proc.stderr
        text = csv_path.read_text()
        assert text.startswith(CSV_HEADER)

    def test_usage_errors_exit_two(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config_dict(strategies=["mystery"])))
        proc = run_cli(["experiment", "--config", str(cfg_path),
                        "--out", str(tmp_path / "x.csv")])
        assert proc.returncode == 2
        assert "error:" in proc.stderr

    def test_violation_exit_one(self, monkeypatch, capsys, tmp_path):
        # exercised via a stubbed sweep because the real bounds always hold
        from scoreclass import cli as cli_mod
        from scoreclass.harness import RatioRecord

        fake = [RatioRecord("t00000", "nonadaptive-rr", 4, 2, 9.0, 2.0,
                            4.5, 4.0, False)]
        monkeypatch.setattr(cli_mod, "run_experiment", lambda cfg: fake)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config_dict()))
        rc = cli_mod.main(["experiment", "--config", str(cfg_path),
                           "--out", str(tmp_path / "out.csv")])
        assert rc == 1
