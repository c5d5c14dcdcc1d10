"""Goal utilities for threshold certification and the greedy cover policy.

Each cutoff gets a monotone submodular utility that tops out exactly when
that threshold's outcome is forced; summing them yields a utility whose
maximum certifies the class itself.  The greedy policy queries the test with
the highest expected utility gain per unit cost until the maximum is reached.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalDefectError, ParameterError
from .model import Instance, PartialAssignment

# Multiplier for the logarithmic sanity envelope on the greedy policy's cost
# ratio; generous by design, it only guards against gross regressions.
GREEDY_ENVELOPE_KAPPA = 4.0


@dataclass(frozen=True)
class ThresholdGoal:
    """Utility certifying one threshold "weighted score >= alpha".

    With omega = total weight - alpha + 1, known positive weight capped at
    alpha (r1) and known negative weight capped at omega (r0), the utility is
    omega*alpha - (alpha - r1)*(omega - r0).  It reaches its goal omega*alpha
    exactly when the threshold is certain either way: r1 = alpha certifies a
    pass, r0 = omega certifies a fail.
    """

    alpha: int
    omega: int
    weights: tuple

    @property
    def goal_value(self) -> int:
        return self.omega * self.alpha

    def value_from_sums(self, one_weight: int, zero_weight: int) -> int:
        r1 = min(self.alpha, one_weight)
        r0 = min(self.omega, zero_weight)
        return self.omega * self.alpha - (self.alpha - r1) * (self.omega - r0)

    def value(self, b: PartialAssignment) -> int:
        one_w = sum(w for w, e in zip(self.weights, b.entries) if e == 1)
        zero_w = sum(w for w, e in zip(self.weights, b.entries) if e == 0)
        return self.value_from_sums(one_w, zero_w)


def threshold_goal(instance: Instance, j: int) -> ThresholdGoal:
    """Goal utility for cutoff j (the lower boundary of class j, 2 <= j <= B)."""
    if not 2 <= j <= instance.num_classes:
        raise ParameterError(
            f"cutoff index must be in 2..{instance.num_classes}, got {j}")
    alpha = instance.cutoffs[j - 1]
    omega = instance.total_weight - alpha + 1
    return ThresholdGoal(alpha=alpha, omega=omega, weights=instance.weights)


@dataclass(frozen=True)
class GoalFunction:
    """Sum of per-cutoff utilities; reaches ``goal_value`` iff the class is fixed."""

    parts: tuple
    goal_value: int

    def value_from_sums(self, one_weight: int, zero_weight: int) -> int:
        return sum(p.value_from_sums(one_weight, zero_weight) for p in self.parts)

    def value(self, b: PartialAssignment) -> int:
        one_w = 0
        zero_w = 0
        for w, e in zip(self.parts[0].weights, b.entries):
            if e == 1:
                one_w += w
            elif e == 0:
                zero_w += w
        return self.value_from_sums(one_w, zero_w)


def combined_goal(instance: Instance) -> GoalFunction:
    parts = tuple(threshold_goal(instance, j)
                  for j in range(2, instance.num_classes + 1))
    goal = sum(p.goal_value for p in parts)
    w_total = instance.total_weight
    if goal > (instance.num_classes - 1) * w_total * w_total:
        raise InternalDefectError("goal value exceeded its quadratic ceiling")
    return GoalFunction(parts=parts, goal_value=goal)


class GoalGreedyStrategy:
    """Query the test with maximum expected utility gain per unit cost.

    Gains are exact integers scaled by probabilities; ties break toward the
    lower test index.  Stops exactly when the utility hits its goal, which
    coincides with class determination.
    """

    def __init__(self, instance: Instance, goal: GoalFunction):
        self.instance = instance
        self.goal = goal

    def finished(self, b: PartialAssignment) -> bool:
        return self.goal.value(b) >= self.goal.goal_value

    def _pick(self, one_w: int, zero_w: int, unqueried) -> int:
        g = self.goal
        base = g.value_from_sums(one_w, zero_w)
        if base >= g.goal_value:
            raise InternalDefectError("goal already reached")
        best_gain = 0.0
        best = -1
        for i in unqueried:
            w = self.instance.weights[i]
            p = self.instance.probs[i]
            up = g.value_from_sums(one_w + w, zero_w) - base
            down = g.value_from_sums(one_w, zero_w + w) - base
            gain = (p * up + (1.0 - p) * down) / self.instance.costs[i]
            if gain > best_gain:
                best_gain = gain
                best = i
        if best < 0:
            raise InternalDefectError(
                "no test offers positive expected gain below the goal")
        return best

    def next_test(self, b: PartialAssignment) -> int:
        one_w = 0
        zero_w = 0
        unqueried = []
        for i, e in enumerate(b.entries):
            if e == 1:
                one_w += self.instance.weights[i]
            elif e == 0:
                zero_w += self.instance.weights[i]
            else:
                unqueried.append(i)
        return self._pick(one_w, zero_w, unqueried)

    def next_from_counts(self, queried_mask: int, acc: int) -> int:
        queried_w = sum(w for i, w in enumerate(self.instance.weights)
                        if (queried_mask >> i) & 1)
        unqueried = [i for i in range(self.instance.n)
                     if not (queried_mask >> i) & 1]
        return self._pick(acc, queried_w - acc, unqueried)

    def describe(self) -> str:
        return "goal-greedy"


def adaptive_greedy(instance: Instance, goal: GoalFunction) -> GoalGreedyStrategy:
    return GoalGreedyStrategy(instance, goal)
