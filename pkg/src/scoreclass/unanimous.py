"""Unanimous-vote evaluation: exact adaptive strategy and truncated round robin.

A unanimous-vote instance has cutoffs [0, 1, n, n+1]: the output is decided
the moment both a positive and a negative outcome are known, and otherwise
only after every test.  After any first test the rest reduces to an OR- or
AND-style search, which makes the adaptive optimum computable in closed form
and admits a golden-ratio-factor non-adaptive order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InternalDefectError, ParameterError, UnsupportedModeError
from .model import UNKNOWN, Instance, PartialAssignment
from .strategies import Permutation

TRR_CONSTANT = (3.0 - math.sqrt(5.0)) / 2.0
GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

BRANCH_LEFT = "LEFT"
BRANCH_RIGHT = "RIGHT"
BRANCH_NONE = "NONE"


def is_unanimous_vote(instance: Instance) -> bool:
    n = instance.n
    return n >= 2 and instance.cutoffs == (0, 1, n, n + 1)


def _require_uv(instance: Instance):
    if not is_unanimous_vote(instance):
        raise UnsupportedModeError(
            f"cutoffs {instance.cutoffs} are not the unanimous-vote pattern "
            f"[0, 1, n, n+1] with n >= 2")


@dataclass(frozen=True)
class RootedUVStrategy:
    """Adaptive plan: fixed first test, then one of two fixed tails.

    The tails order the non-root tests: a negative first outcome sends the
    run down ``or_tail`` (stop at the first positive), a positive one down
    ``and_tail`` (stop at the first negative).
    """

    root: int
    or_tail: tuple
    and_tail: tuple
    expected_cost: float

    def next_test(self, b: PartialAssignment) -> int:
        if b.entries[self.root] == UNKNOWN:
            return self.root
        tail = self.or_tail if b.entries[self.root] == 0 else self.and_tail
        for t in tail:
            if b.entries[t] == UNKNOWN:
                return t
        raise InternalDefectError("tail exhausted while still undetermined")

    def describe(self) -> str:
        return f"uv-adaptive root={self.root}"


def _tails(instance: Instance, root: int):
    c, p = instance.costs, instance.probs
    rest = [i for i in range(instance.n) if i != root]
    or_order = sorted(rest, key=lambda i: (c[i] / p[i], i))
    and_order = sorted(rest, key=lambda i: (c[i] / (1.0 - p[i]), i))
    return or_order, and_order


def _chain_cost(instance: Instance, order, stop_on_one: bool) -> float:
    """Expected cost of querying ``order`` until the stopping outcome appears."""
    c, p = instance.costs, instance.probs
    alive = 1.0
    total = 0.0
    for i in order:
        total += alive * c[i]
        alive *= (1.0 - p[i]) if stop_on_one else p[i]
    return total


def uv_adaptive_exact(instance: Instance) -> RootedUVStrategy:
    """Optimal adaptive strategy, found by trying every test as the root.

    For a fixed root the continuation is forced: ascending cost/prob after a
    negative root, ascending cost/(1-prob) after a positive one, with the
    expected cost available in closed form.  Ties go to the lowest root.
    """
    _require_uv(instance)
    c, p = instance.costs, instance.probs
    best = None
    for root in range(instance.n):
        or_order, and_order = _tails(instance, root)
        cost = (c[root]
                + (1.0 - p[root]) * _chain_cost(instance, or_order, stop_on_one=True)
                + p[root] * _chain_cost(instance, and_order, stop_on_one=False))
        if best is None or cost < best.expected_cost:
            best = RootedUVStrategy(root, tuple(or_order), tuple(and_order), cost)
    return best


def uv_permutation_cost(instance: Instance, order) -> float:
    """Exact expected cost of a fixed order on a unanimous-vote instance.

    Test t is paid whenever the first t-1 outcomes all agree; the first two
    tests are always paid.
    """
    _require_uv(instance)
    seq = order.order if isinstance(order, Permutation) else tuple(order)
    if sorted(seq) != list(range(instance.n)):
        raise ParameterError(f"not a permutation of 0..{instance.n - 1}: {seq}")
    c, p = instance.costs, instance.probs
    total = c[seq[0]]
    all_ones = 1.0
    all_zeros = 1.0
    for t in range(1, instance.n):
        prev = seq[t - 1]
        all_ones *= p[prev]
        all_zeros *= 1.0 - p[prev]
        total += c[seq[t]] * (all_ones + all_zeros)
    return total


@dataclass(frozen=True)
class TRRPlan:
    """Non-adaptive unanimous-vote order with a commitment point.

    Phase one walks the probability-sorted tails level by level from both
    ends; at level ``phase_boundary`` the plan commits to one branch and
    finishes it in a monotone probability order.
    """

    root: int
    query_order: Permutation
    phase_boundary: object
    committed_branch: str

    def as_dict(self) -> dict:
        return {
            "root": self.root,
            "order": list(self.query_order.order),
            "phase_boundary": self.phase_boundary,
            "branch": self.committed_branch,
        }


def _build_plan(instance: Instance, root: int, c: float) -> TRRPlan:
    n = instance.n
    probs = instance.probs
    # Relabel the non-root tests by descending probability, original index
    # breaking ties, so position l pairs with position n-l.
    rest = sorted((i for i in range(n) if i != root),
                  key=lambda i: (-probs[i], i))
    order = [root]
    level = 1
    boundary = None
    branch = BRANCH_NONE
    while 2 * level <= n:
        p_lo = probs[rest[level - 1]]
        p_hi = probs[rest[n - level - 1]]
        if not (p_hi < 1.0 - c and p_lo > c):
            boundary = level
            branch = BRANCH_RIGHT if p_hi >= 1.0 - c else BRANCH_LEFT
            break
        if level == n - level:
            order.append(rest[level - 1])
        elif abs(p_lo - 0.5) <= abs(p_hi - 0.5):
            order.append(rest[level - 1])
            order.append(rest[n - level - 1])
        else:
            order.append(rest[n - level - 1])
            order.append(rest[level - 1])
        level += 1
    if boundary is not None:
        remaining = rest[level - 1:n - level]
        if branch == BRANCH_RIGHT:
            order.extend(reversed(remaining))  # ascending probability
        else:
            order.extend(remaining)  # descending probability
    return TRRPlan(root, Permutation(tuple(order)), boundary, branch)


def trr_plan(instance: Instance, root: int, c: float) -> TRRPlan:
    """Truncated-round-robin order for a fixed root and constant c in (0, 1/2).

    Levels are queried in pairs (the probability nearer one half first) while
    both ends stay inside (c, 1-c); the first level breaking that guard fixes
    the committed branch, whose remaining tests follow in monotone
    probability order.
    """
    _require_uv(instance)
    if not all(cost == 1 for cost in instance.costs):
        raise UnsupportedModeError("the truncated round robin requires unit costs")
    if not 0.0 < c < 0.5:
        raise ParameterError(f"c must lie in (0, 1/2), got {c}")
    if not 0 <= root < instance.n:
        raise ParameterError(f"root must be a test index, got {root}")
    return _build_plan(instance, root, c)


def trr_best(instance: Instance):
    """Best truncated-round-robin plan over all roots, with its expected cost."""
    best = None
    best_cost = None
    for root in range(instance.n):
        plan = trr_plan(instance, root, TRR_CONSTANT)
        cost = uv_permutation_cost(instance, plan.query_order)
        if best_cost is None or cost < best_cost:
            best = plan
            best_cost = cost
    return best, best_cost


def uv_round_robin(instance: Instance) -> Permutation:
    """Plain untruncated interleave, best root kept: the 2-approximate order.

    Equals the limit of the truncated plan as c approaches zero; works for
    arbitrary costs because it never needs a commitment rule.
    """
    _require_uv(instance)
    if all(cost == 1 for cost in instance.costs):
        best = None
        best_cost = None
        for root in range(instance.n):
            plan = _build_plan(instance, root, 0.0)
            if plan.committed_branch != BRANCH_NONE:
                raise InternalDefectError("zero truncation constant must never commit")
            cost = uv_permutation_cost(instance, plan.query_order)
            if best_cost is None or cost < best_cost:
                best = plan.query_order
                best_cost = cost
        return best
    # Arbitrary costs: balance accumulated cost between the two tails.
    costs = instance.costs
    best = None
    best_cost = None
    for root in range(instance.n):
        or_order, and_order = _tails(instance, root)
        spent = [0.0, 0.0]
        ptr = [0, 0]
        queried = {root}
        out = [root]
        sides = (or_order, and_order)
        for _ in range(instance.n - 1):
            pick = None
            for side in (0, 1):
                o = sides[side]
                while ptr[side] < len(o) and o[ptr[side]] in queried:
                    ptr[side] += 1
                if ptr[side] < len(o):
                    t = o[ptr[side]]
                    key = spent[side] + costs[t]
                    if pick is None or key < pick[0]:
                        pick = (key, side, t)
            _, side, t = pick
            spent[side] += costs[t]
            queried.add(t)
            out.append(t)
        order = Permutation(tuple(out))
        cost = uv_permutation_cost(instance, order)
        if best_cost is None or cost < best_cost:
            best = order
            best_cost = cost
    return best
