"""Ground-truth engines.

Exact expected cost of any strategy (factored over knowledge states where the
strategy permits, per-assignment enumeration otherwise), the optimal adaptive
and non-adaptive baselines, one-sided threshold walk costs, and optimal
verification costs, all exact up to floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ._backend import kernels as K
from .errors import InternalDefectError, ParameterError, ResourceLimitError, UnsupportedModeError
from .model import UNKNOWN, Instance, PartialAssignment, classify, is_determined, _arrays
from .strategies import Permutation

ADAPTIVE_DP_GUARD = 16
PERMUTATION_GUARD = 9
ENUMERATION_GUARD = 24


@dataclass(frozen=True)
class CostReport:
    """Expected cost of one strategy, split by the class of the outcome."""

    total: float
    per_block: dict
    strategy_id: str


@dataclass(frozen=True)
class RunResult:
    decided_class: object
    cost: float
    tests: tuple


def run_on_assignment(instance: Instance, strategy, bits) -> RunResult:
    """Execute a strategy against fixed outcomes, stopping at determination.

    Strategies exposing ``finished`` may stop earlier than class
    determination; the decided class is then None.
    """
    b = PartialAssignment.all_unknown(instance.n)
    cost = 0.0
    tests = []
    fin = getattr(strategy, "finished", None)
    while True:
        j = is_determined(instance, b)
        if j is not None:
            return RunResult(j, cost, tuple(tests))
        if fin is not None and fin(b):
            return RunResult(None, cost, tuple(tests))
        t = strategy.next_test(b)
        if b.entries[t] != UNKNOWN:
            raise InternalDefectError(f"strategy proposed already-queried test {t}")
        b = b.with_value(t, bits[t])
        cost += instance.costs[t]
        tests.append(t)


def enumeration_cost(instance: Instance, strategy, enum_limit=ENUMERATION_GUARD) -> CostReport:
    """Per-assignment expected cost: the independent reference engine."""
    n = instance.n
    if n > enum_limit:
        raise ResourceLimitError(f"n={n} exceeds the enumeration guard {enum_limit}")
    probs = instance.probs
    weights = instance.weights
    per_block = {j: 0.0 for j in range(1, instance.num_classes + 1)}
    for bits in itertools.product((0, 1), repeat=n):
        px = 1.0
        score = 0
        for p, w, xi in zip(probs, weights, bits):
            px *= p if xi else 1.0 - p
            score += w * xi
        run = run_on_assignment(instance, strategy, bits)
        per_block[classify(instance, score)] += px * run.cost
    total = sum(per_block.values())
    return CostReport(total, per_block, _describe(strategy))


def _describe(strategy) -> str:
    d = getattr(strategy, "describe", None)
    return d() if d is not None else type(strategy).__name__


def _per_block_dict(values) -> dict:
    return {j + 1: float(v) for j, v in enumerate(values)}


def _count_dp_cost(instance: Instance, strategy) -> CostReport:
    """Factored cost for strategies whose choice depends only on (mask, acc).

    Pushes probability mass forward through knowledge states, charging each
    query against the conditional class distribution of the final score.
    """
    costs, probs, weights, _ = _arrays(instance)
    n = instance.n
    num_classes = instance.num_classes
    cuts = instance.cutoffs
    w_total = instance.total_weight
    pmf_cache = {}

    def rem_pmf(mask):
        got = pmf_cache.get(mask)
        if got is not None:
            return got
        pmf = np.zeros(w_total + 1)
        pmf[0] = 1.0
        for i in range(n):
            if (mask >> i) & 1:
                continue
            nxt = pmf * (1.0 - probs[i])
            w = int(weights[i])
            nxt[w:] += pmf[:w_total + 1 - w] * probs[i]
            pmf = nxt
        pmf_cache[mask] = pmf
        return pmf

    def window_class(acc, remw):
        lo = classify(instance, acc)
        return lo if classify(instance, acc + remw) == lo else None

    per_block = np.zeros(num_classes)
    frontier = {(0, 0): 1.0}
    rem_weight = {0: w_total}
    while frontier:
        nxt_frontier = {}
        for (mask, acc), mass in frontier.items():
            remw = rem_weight.setdefault(
                mask, w_total - sum(int(w) for i, w in enumerate(weights)
                                    if (mask >> i) & 1))
            if window_class(acc, remw) is not None:
                continue
            i = strategy.next_from_counts(mask, acc)
            pmf = rem_pmf(mask)
            for j in range(num_classes):
                lo = max(cuts[j] - acc, 0)
                hi = min(cuts[j + 1] - 1 - acc, remw)
                if hi >= lo:
                    per_block[j] += costs[i] * mass * float(pmf[lo:hi + 1].sum())
            m2 = mask | (1 << i)
            w = int(weights[i])
            key_up = (m2, acc + w)
            key_down = (m2, acc)
            nxt_frontier[key_up] = nxt_frontier.get(key_up, 0.0) + mass * probs[i]
            nxt_frontier[key_down] = nxt_frontier.get(key_down, 0.0) + mass * (1.0 - probs[i])
        frontier = nxt_frontier
    total = float(per_block.sum())
    return CostReport(total, _per_block_dict(per_block), _describe(strategy))


def strategy_cost(instance: Instance, strategy, engine="auto",
                  enum_limit=ENUMERATION_GUARD) -> CostReport:
    """Exact expected cost of a strategy with per-class breakdown.

    Fixed orders and count-driven policies are factored over knowledge
    states; anything else is enumerated over all assignments (guarded by
    ``enum_limit``).  ``engine`` may force "enum" or "factored".
    """
    if engine not in ("auto", "factored", "enum"):
        raise ParameterError(f"unknown engine {engine!r}")
    if engine == "enum":
        return enumeration_cost(instance, strategy, enum_limit)
    costs, probs, weights, cuts = _arrays(instance)
    from .strategies import KofNStrategy, RepeatedKofN

    if isinstance(strategy, Permutation):
        total, blocks = K.perm_cost_blocks(costs, probs, weights, cuts,
                                           np.asarray(strategy.order, dtype=np.int64))
        return CostReport(float(total), _per_block_dict(blocks), _describe(strategy))
    if (isinstance(strategy, KofNStrategy) and instance.num_classes == 2
            and instance.cutoffs[1] == strategy.k and instance.is_unweighted):
        idx1 = np.asarray(strategy.idx1, dtype=np.int64)
        idx0 = np.asarray(strategy.idx0, dtype=np.int64)
        total, blocks = K.kofn_cost_blocks(costs, probs, cuts, strategy.k, idx1, idx0)
        return CostReport(float(total), _per_block_dict(blocks), _describe(strategy))
    if isinstance(strategy, RepeatedKofN):
        if instance.n > enum_limit:
            raise ResourceLimitError(
                f"n={instance.n} exceeds the enumeration guard {enum_limit}")
        idx1 = np.asarray(strategy.idx1, dtype=np.int64)
        idx0 = np.asarray(strategy.idx0, dtype=np.int64)
        total, blocks, _ = K.bminus1_enum(costs, probs, cuts, idx1, idx0)
        return CostReport(float(total), _per_block_dict(blocks), _describe(strategy))
    if isinstance(strategy, PolicyStrategy):
        if instance.n > enum_limit:
            raise ResourceLimitError(
                f"n={instance.n} exceeds the enumeration guard {enum_limit}")
        total, blocks = K.policy_cost_blocks(costs, probs, weights, cuts, strategy.policy)
        return CostReport(float(total), _per_block_dict(blocks), _describe(strategy))
    if hasattr(strategy, "next_from_counts"):
        return _count_dp_cost(instance, strategy)
    if engine == "factored":
        raise ParameterError(f"no factored engine for {type(strategy).__name__}")
    return enumeration_cost(instance, strategy, enum_limit)


class PolicyStrategy:
    """Adaptive strategy read off a (mask, acc)-indexed next-test table."""

    def __init__(self, instance: Instance, policy):
        self.instance = instance
        self.policy = policy

    def _next(self, mask: int, acc: int) -> int:
        i = int(self.policy[mask, acc])
        if i < 0:
            raise InternalDefectError("policy consulted at a determined state")
        return i

    def next_test(self, b: PartialAssignment) -> int:
        acc = sum(w for w, e in zip(self.instance.weights, b.entries) if e == 1)
        return self._next(b.queried_mask(), acc)

    def next_from_counts(self, queried_mask: int, acc: int) -> int:
        return self._next(queried_mask, acc)

    def describe(self) -> str:
        return "adaptive-optimal"


@dataclass(frozen=True)
class AdaptiveOracle:
    """Value table of the optimal adaptive policy plus the policy itself."""

    instance: Instance
    value: object
    policy: object

    @property
    def expected_cost(self) -> float:
        return float(self.value[0, 0])

    def constrained_root_left(self, root: int, left: int) -> float:
        """Optimal cost when the first test and the test after a negative
        first outcome are both pinned."""
        inst = self.instance
        if root == left or not (0 <= root < inst.n and 0 <= left < inst.n):
            raise ParameterError(f"root/left must be distinct test indices, "
                                 f"got {root}, {left}")
        c, p, w = inst.costs, inst.probs, inst.weights
        m_r = 1 << root
        m_rl = m_r | (1 << left)
        after_left = (c[left]
                      + p[left] * float(self.value[m_rl, w[left]])
                      + (1.0 - p[left]) * float(self.value[m_rl, 0]))
        return (c[root]
                + p[root] * float(self.value[m_r, w[root]])
                + (1.0 - p[root]) * after_left)

    def strategy(self) -> PolicyStrategy:
        return PolicyStrategy(self.instance, self.policy)

    def cost_report(self) -> CostReport:
        return strategy_cost(self.instance, self.strategy())


def adaptive_table(instance: Instance, max_n=ADAPTIVE_DP_GUARD) -> AdaptiveOracle:
    if instance.n > max_n:
        raise ResourceLimitError(
            f"n={instance.n} exceeds the adaptive DP guard {max_n}")
    costs, probs, weights, cuts = _arrays(instance)
    value, policy = K.adaptive_dp(costs, probs, weights, cuts)
    return AdaptiveOracle(instance, value, policy)


def optimal_adaptive(instance: Instance, max_n=ADAPTIVE_DP_GUARD):
    """Minimum expected cost over all adaptive strategies, with an optimal policy."""
    table = adaptive_table(instance, max_n)
    return table.expected_cost, table.strategy()


def optimal_nonadaptive(instance: Instance, max_n=PERMUTATION_GUARD):
    """Minimum expected cost over all n! query orders, with an optimal order.

    Exact: a fixed order's cost decomposes over its prefix sets, so the
    minimum is a shortest path through the subset lattice.
    """
    if instance.n > max_n:
        raise ResourceLimitError(
            f"n={instance.n} exceeds the permutation guard {max_n}")
    costs, probs, weights, cuts = _arrays(instance)
    best, order = K.nonadaptive_dp(costs, probs, weights, cuts)
    return float(best), Permutation(tuple(int(t) for t in order))


MODE_BLOCK = "BLOCK"
MODE_VALUE = "VALUE"


def block_verification_opt(instance: Instance, j: int,
                           max_n=ADAPTIVE_DP_GUARD) -> float:
    """Minimum expected cost charged on block j among strategies that always
    settle whether the score lands in block j."""
    if not 1 <= j <= instance.num_classes:
        raise ParameterError(f"block index must be in 1..{instance.num_classes}, got {j}")
    if instance.n > max_n:
        raise ResourceLimitError(
            f"n={instance.n} exceeds the adaptive DP guard {max_n}")
    costs, probs, weights, cuts = _arrays(instance)
    w_total = instance.total_weight
    lo, hi = instance.cutoffs[j - 1], instance.cutoffs[j] - 1
    target = np.zeros(w_total + 1)
    target[lo:hi + 1] = 1.0
    return float(K.verification_dp(costs, probs, weights, cuts, target, lo, hi, 0))


def verification_opt(instance: Instance, mode: str,
                     max_n=ADAPTIVE_DP_GUARD) -> float:
    """Total optimal verification cost.

    BLOCK sums the per-block optima.  VALUE charges by output label instead:
    one class-determining strategy per distinct label, each paying only on
    assignments with that label.
    """
    if mode == MODE_BLOCK:
        return sum(block_verification_opt(instance, j, max_n)
                   for j in range(1, instance.num_classes + 1))
    if mode != MODE_VALUE:
        raise ParameterError(f"mode must be {MODE_BLOCK} or {MODE_VALUE}, got {mode!r}")
    if instance.labels is None:
        raise ParameterError("VALUE-mode verification needs explicit labels")
    if instance.n > max_n:
        raise ResourceLimitError(
            f"n={instance.n} exceeds the adaptive DP guard {max_n}")
    costs, probs, weights, cuts = _arrays(instance)
    w_total = instance.total_weight
    seen = []
    for lab in instance.labels:
        if lab not in seen:
            seen.append(lab)
    total = 0.0
    for lab in seen:
        target = np.zeros(w_total + 1)
        for j in range(1, instance.num_classes + 1):
            if instance.labels[j - 1] == lab:
                target[instance.cutoffs[j - 1]:instance.cutoffs[j]] = 1.0
        total += float(K.verification_dp(costs, probs, weights, cuts,
                                         target, 0, 0, 1))
    return total


def one_sided_block_cost(instance: Instance, j: int, side: int, order) -> float:
    """Cost of a fixed order run as a one-sided walk, charged on block j.

    side 1 queries until the block's lower threshold is certified (that many
    ones seen); side 0 until the upper one is (enough zeros seen).
    """
    if not instance.is_unweighted:
        raise UnsupportedModeError("one-sided block costs require unit weights")
    if not 1 <= j <= instance.num_classes:
        raise ParameterError(f"block index must be in 1..{instance.num_classes}, got {j}")
    if side not in (0, 1):
        raise ParameterError(f"side must be 0 or 1, got {side}")
    costs, probs, _, _ = _arrays(instance)
    seq = order.order if isinstance(order, Permutation) else tuple(order)
    alpha, beta = instance.cutoffs[j - 1], instance.cutoffs[j]
    return float(K.block_cost_of_perm(costs, probs, alpha, beta, side,
                                      np.asarray(seq, dtype=np.int64)))


def min_one_sided_block_cost(instance: Instance, j: int, side: int,
                             max_n=8) -> float:
    """Exact minimum of the one-sided block cost over all n! orders."""
    if instance.n > max_n:
        raise ResourceLimitError(
            f"n={instance.n} exceeds the permutation sweep guard {max_n}")
    if not instance.is_unweighted:
        raise UnsupportedModeError("one-sided block costs require unit weights")
    if side not in (0, 1):
        raise ParameterError(f"side must be 0 or 1, got {side}")
    costs, probs, _, _ = _arrays(instance)
    alpha, beta = instance.cutoffs[j - 1], instance.cutoffs[j]
    return float(K.block_cost_min_over_perms(costs, probs, alpha, beta, side))
