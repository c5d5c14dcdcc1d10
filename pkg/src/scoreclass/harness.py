"""Experiment harness: seeded instance generation and approximation-ratio sweeps.

Every sweep writes one CSV row per (instance, strategy) cell comparing the
strategy's exact expected cost against the matching optimum and the factor
guaranteed for that strategy on that instance family.  Identical config and
seed reproduce byte-identical output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ScoreClassError
from .goals import GREEDY_ENVELOPE_KAPPA, adaptive_greedy, combined_goal
from .model import Instance
from .oracle import optimal_adaptive, optimal_nonadaptive, strategy_cost
from .strategies import b_minus_1_adaptive, kofn_strategy, nonadaptive_rr
from .unanimous import GOLDEN_RATIO, is_unanimous_vote, trr_best, uv_adaptive_exact

_CONFIG_KEYS = {"n_range", "B_range", "cost_mode", "prob_mode", "trials",
                "seed", "strategies", "oracle"}

CSV_HEADER = "instance_id,strategy,n,B,expected_cost,oracle_cost,ratio,bound,within_bound"

RATIO_SLACK = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    n_range: tuple
    b_range: tuple
    cost_mode: tuple
    prob_mode: tuple
    trials: int
    seed: int
    strategies: tuple
    oracle: str


@dataclass(frozen=True)
class RatioRecord:
    instance_id: str
    strategy: str
    n: int
    num_classes: int
    expected_cost: float
    oracle_cost: float
    ratio: float
    bound: float
    within_bound: bool


def _int_pair(name, value):
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, int) for v in value)):
        raise ParameterError(f"{name} must be a two-integer [lo, hi] list")
    lo, hi = value
    if lo > hi:
        raise ParameterError(f"{name} bounds out of order: {value}")
    return (lo, hi)


def parse_config(obj: dict) -> ExperimentConfig:
    if not isinstance(obj, dict):
        raise ParameterError("config file must hold a single JSON object")
    unknown = set(obj) - _CONFIG_KEYS
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    missing = _CONFIG_KEYS - set(obj)
    if missing:
        raise ParameterError(f"config missing keys: {sorted(missing)}")

    n_range = _int_pair("n_range", obj["n_range"])
    b_range = _int_pair("B_range", obj["B_range"])
    if n_range[0] < 1:
        raise ParameterError("n_range lower bound must be at least 1")
    if b_range[0] < 2:
        raise ParameterError("B_range lower bound must be at least 2")
    if b_range[1] - 1 > n_range[0]:
        raise ParameterError(
            f"infeasible B for n: up to {b_range[1]} classes need "
            f"{b_range[1] - 1} interior cutoffs but n may be {n_range[0]}")

    cm = obj["cost_mode"]
    if not isinstance(cm, dict) or "kind" not in cm:
        raise ParameterError("cost_mode must be an object with a 'kind' key")
    if cm["kind"] == "UNIT":
        if set(cm) != {"kind"}:
            raise ParameterError("UNIT cost_mode takes no extra keys")
        cost_mode = ("UNIT",)
    elif cm["kind"] == "UNIFORM_INT":
        if set(cm) != {"kind", "lo", "hi"}:
            raise ParameterError("UNIFORM_INT cost_mode needs exactly lo and hi")
        if not (isinstance(cm["lo"], int) and isinstance(cm["hi"], int)
                and 1 <= cm["lo"] <= cm["hi"]):
            raise ParameterError("UNIFORM_INT bounds must be integers with 1 <= lo <= hi")
        cost_mode = ("UNIFORM_INT", cm["lo"], cm["hi"])
    else:
        raise ParameterError(f"unknown cost_mode kind {cm['kind']!r}")

    pm = obj["prob_mode"]
    if (not isinstance(pm, dict) or pm.get("kind") != "UNIFORM"
            or set(pm) != {"kind", "lo", "hi"}):
        raise ParameterError("prob_mode must be {'kind': 'UNIFORM', 'lo': .., 'hi': ..}")
    plo, phi = float(pm["lo"]), float(pm["hi"])
    if not (0.0 < plo <= phi < 1.0):
        raise ParameterError("prob bounds must satisfy 0 < lo <= hi < 1")
    prob_mode = ("UNIFORM", plo, phi)

    trials = obj["trials"]
    if not isinstance(trials, int) or trials < 1:
        raise ParameterError("trials must be a positive integer")
    seed = obj["seed"]
    if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ParameterError("seed must be an unsigned 64-bit integer")

    strategies = obj["strategies"]
    if not isinstance(strategies, list) or not strategies:
        raise ParameterError("strategies must be a non-empty list of names")
    for name in strategies:
        if name not in STRATEGY_BUILDERS:
            raise ParameterError(
                f"unknown strategy {name!r}; known: {sorted(STRATEGY_BUILDERS)}")

    oracle = obj["oracle"]
    if oracle not in ("ADAPTIVE", "NONADAPTIVE", "BOTH"):
        raise ParameterError("oracle must be ADAPTIVE, NONADAPTIVE, or BOTH")

    if any(name in UV_ONLY_STRATEGIES for name in strategies):
        if b_range != (3, 3):
            raise ParameterError(
                "unanimous-vote strategies need B_range [3, 3]; the sweep then "
                "draws unanimous-vote cutoffs [0, 1, n, n+1]")
        if n_range[0] < 2:
            raise ParameterError("unanimous-vote sweeps need n_range >= 2")

    return ExperimentConfig(n_range, b_range, cost_mode, prob_mode,
                            trials, seed, tuple(strategies), oracle)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(json.load(fh))


def generate(config: ExperimentConfig):
    """Yield (instance_id, Instance) pairs, deterministic under (seed, config).

    Per trial the draws happen in a fixed order that is part of the format:
    n, number of classes, interior cutoffs (a distinct sorted subset of 1..n),
    probabilities, then costs.  Sweeps naming a unanimous-vote-only strategy
    instead fix the cutoffs to [0, 1, n, n+1] (drawing n, probabilities,
    costs only).
    """
    rng = np.random.default_rng(config.seed)
    nlo, nhi = config.n_range
    blo, bhi = config.b_range
    uv_family = any(name in UV_ONLY_STRATEGIES for name in config.strategies)
    for idx in range(config.trials):
        n = int(rng.integers(nlo, nhi + 1))
        if uv_family:
            cutoffs = (0, 1, n, n + 1)
        else:
            b = int(rng.integers(blo, bhi + 1))
            interior = np.sort(rng.choice(np.arange(1, n + 1), size=b - 1,
                                          replace=False))
            cutoffs = (0,) + tuple(int(a) for a in interior) + (n + 1,)
        plo, phi = config.prob_mode[1], config.prob_mode[2]
        probs = tuple(float(p) for p in rng.uniform(plo, phi, n))
        if config.cost_mode[0] == "UNIT":
            costs = (1.0,) * n
        else:
            lo, hi = config.cost_mode[1], config.cost_mode[2]
            costs = tuple(float(c) for c in rng.integers(lo, hi + 1, n))
        yield f"t{idx:05d}", Instance(n=n, costs=costs, probs=probs,
                                      weights=(1,) * n, cutoffs=cutoffs)


def _build_kofn(instance: Instance):
    if instance.num_classes != 2:
        raise ParameterError("the kofn strategy needs a two-class instance")
    return kofn_strategy(instance, instance.cutoffs[1])


def _build_trr(instance: Instance):
    plan, _ = trr_best(instance)
    return plan.query_order


STRATEGY_BUILDERS = {
    "kofn": _build_kofn,
    "b-minus-1": b_minus_1_adaptive,
    "nonadaptive-rr": nonadaptive_rr,
    "goal-greedy": lambda inst: adaptive_greedy(inst, combined_goal(inst)),
    "uv-adaptive": uv_adaptive_exact,
    "trr": _build_trr,
}

UV_ONLY_STRATEGIES = frozenset({"uv-adaptive", "trr"})


def build_strategy(name: str, instance: Instance):
    """Single registry for strategy names; unknown names fail immediately."""
    builder = STRATEGY_BUILDERS.get(name)
    if builder is None:
        raise ParameterError(
            f"unknown strategy {name!r}; known: {sorted(STRATEGY_BUILDERS)}")
    return builder(instance)


def _unit_costs(instance: Instance) -> bool:
    return all(c == 1 for c in instance.costs)


def canonical_oracle(name: str, instance: Instance) -> str:
    """The optimum each strategy's guarantee is stated against."""
    if name == "nonadaptive-rr" and not _unit_costs(instance):
        return "NONADAPTIVE"
    return "ADAPTIVE"


def bound_for(name: str, oracle_kind: str, instance: Instance) -> float:
    """Guaranteed cost factor for a strategy against the given optimum.

    Raises for combinations without a stated guarantee so sweeps fail before
    any computation.
    """
    b = instance.num_classes
    if name == "kofn" and oracle_kind == "ADAPTIVE":
        return 1.0
    if name == "uv-adaptive" and oracle_kind == "ADAPTIVE":
        return 1.0
    if name == "b-minus-1" and oracle_kind == "ADAPTIVE":
        return float(b - 1)
    if name == "nonadaptive-rr":
        if oracle_kind == "NONADAPTIVE":
            return 2.0 * (b - 1)
        if oracle_kind == "ADAPTIVE" and _unit_costs(instance):
            return 4.0
    if name == "trr" and oracle_kind == "ADAPTIVE":
        if not (is_unanimous_vote(instance) and _unit_costs(instance)):
            raise ParameterError(
                "trr applies only to unit-cost unanimous-vote instances")
        return GOLDEN_RATIO
    if name == "goal-greedy" and oracle_kind == "ADAPTIVE":
        goal = combined_goal(instance)
        return GREEDY_ENVELOPE_KAPPA * math.log(goal.goal_value + 1.0)
    raise ParameterError(
        f"no stated factor for strategy {name!r} against the {oracle_kind} optimum")


def run_experiment(config: ExperimentConfig):
    """One RatioRecord per (instance, strategy); records never mutate instances."""
    records = []
    for instance_id, instance in generate(config):
        oracle_cache = {}

        def oracle_cost_of(kind):
            if kind not in oracle_cache:
                if kind == "ADAPTIVE":
                    oracle_cache[kind] = optimal_adaptive(instance)[0]
                else:
                    oracle_cache[kind] = optimal_nonadaptive(instance)[0]
            return oracle_cache[kind]

        for name in sorted(config.strategies):
            try:
                kind = (canonical_oracle(name, instance)
                        if config.oracle == "BOTH" else config.oracle)
                bound = bound_for(name, kind, instance)
                strategy = build_strategy(name, instance)
                expected = strategy_cost(instance, strategy).total
                oracle_cost = oracle_cost_of(kind)
            except ScoreClassError as exc:
                raise type(exc)(f"[instance {instance_id}] {exc}") from exc
            ratio = expected / oracle_cost
            records.append(RatioRecord(
                instance_id=instance_id,
                strategy=name,
                n=instance.n,
                num_classes=instance.num_classes,
                expected_cost=expected,
                oracle_cost=oracle_cost,
                ratio=ratio,
                bound=bound,
                within_bound=ratio <= bound + RATIO_SLACK,
            ))
    records.sort(key=lambda r: (r.instance_id, r.strategy))
    return records


def records_to_csv(records) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join([
            r.instance_id,
            r.strategy,
            str(r.n),
            str(r.num_classes),
            format(r.expected_cost, ".10g"),
            format(r.oracle_cost, ".10g"),
            format(r.ratio, ".10g"),
            format(r.bound, ".10g"),
            "true" if r.within_bound else "false",
        ]))
    return "\n".join(lines) + "\n"


def write_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))
