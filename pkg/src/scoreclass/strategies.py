"""Evaluation strategies.

Covers the exact k-of-n testing policy, the cost-balanced round robin
combinator, the non-adaptive interleave of the two ratio orderings, and the
repeated-threshold class finder that answers one cutoff at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalDefectError, ParameterError, UnsupportedModeError
from .model import UNKNOWN, Instance, PartialAssignment

MODE_ALL = "ALL"
MODE_ANY = "ANY"


@dataclass(frozen=True)
class Permutation:
    """A fixed query order covering every test exactly once."""

    order: tuple

    def __post_init__(self):
        n = len(self.order)
        if sorted(self.order) != list(range(n)):
            raise ParameterError(f"not a permutation of 0..{n - 1}: {self.order}")

    def __len__(self):
        return len(self.order)

    def next_test(self, b: PartialAssignment) -> int:
        for t in self.order:
            if b.entries[t] == UNKNOWN:
                return t
        raise InternalDefectError("permutation exhausted while still undetermined")

    def describe(self) -> str:
        return "perm " + ",".join(str(t) for t in self.order)


def sigma_orderings(instance: Instance):
    """The two ratio orderings: ascending cost/prob and ascending cost/(1-prob).

    The first finds positive outcomes cheaply, the second negative ones; ties
    break toward the lower test index.
    """
    c, p = instance.costs, instance.probs
    one_sided = sorted(range(instance.n), key=lambda i: (c[i] / p[i], i))
    zero_sided = sorted(range(instance.n), key=lambda i: (c[i] / (1.0 - p[i]), i))
    return Permutation(tuple(one_sided)), Permutation(tuple(zero_sided))


def _kofn_next(queried_mask, ones, zeros, k, n, idx1, idx0):
    """Lowest-index test lying in both residual candidate sets.

    The residual problem still needs k-ones positive results or
    (n-k+1)-zeros negative ones; the candidate sets are the first that-many
    unqueried tests of each ratio ordering, and they must intersect because
    their sizes sum to one more than the number of unqueried tests.
    """
    need_ones = k - ones
    need_zeros = (n - k + 1) - zeros
    in_s1 = 0
    cnt = 0
    for t in idx1:
        if (queried_mask >> t) & 1:
            continue
        in_s1 |= 1 << t
        cnt += 1
        if cnt == need_ones:
            break
    best = -1
    cnt = 0
    for t in idx0:
        if (queried_mask >> t) & 1:
            continue
        if (in_s1 >> t) & 1 and (best < 0 or t < best):
            best = t
        cnt += 1
        if cnt == need_zeros:
            break
    if best < 0:
        raise InternalDefectError("candidate sets failed to intersect")
    return best


class KofNStrategy:
    """Optimal adaptive evaluation of "at least k positive outcomes".

    Queries a test common to the k cheapest-per-one and (remaining - k + 1)
    cheapest-per-zero candidates until k ones or n-k+1 zeros are seen.
    """

    def __init__(self, instance: Instance, k: int):
        if not instance.is_unweighted:
            raise UnsupportedModeError("the k-of-n policy requires unit weights")
        if not 1 <= k <= instance.n:
            raise ParameterError(f"k must be in 1..{instance.n}, got {k}")
        self.instance = instance
        self.k = k
        s1, s0 = sigma_orderings(instance)
        self.idx1 = s1.order
        self.idx0 = s0.order

    def finished(self, b: PartialAssignment) -> bool:
        return b.num_ones >= self.k or b.num_zeros >= self.instance.n - self.k + 1

    def next_test(self, b: PartialAssignment) -> int:
        if self.finished(b):
            raise InternalDefectError("k-of-n outcome already resolved")
        return _kofn_next(b.queried_mask(), b.num_ones, b.num_zeros,
                          self.k, self.instance.n, self.idx1, self.idx0)

    def next_from_counts(self, queried_mask: int, ones: int) -> int:
        zeros = bin(queried_mask).count("1") - ones
        return _kofn_next(queried_mask, ones, zeros,
                          self.k, self.instance.n, self.idx1, self.idx0)

    def evaluate(self, b: PartialAssignment):
        """1 if at least k ones are certain, 0 if impossible, else None."""
        if b.num_ones >= self.k:
            return 1
        if b.num_zeros >= self.instance.n - self.k + 1:
            return 0
        return None

    def describe(self) -> str:
        return f"kofn k={self.k}"


def kofn_strategy(instance: Instance, k: int) -> KofNStrategy:
    return KofNStrategy(instance, k)


@dataclass(frozen=True)
class SubStrategy:
    """A preference order plus the stopping predicate it works toward.

    ``proposals`` are walked in order, skipping tests already answered in the
    shared knowledge state; the predicate must be monotone under extension.
    """

    proposals: tuple
    predicate: object

    def next_test(self, b: PartialAssignment):
        for t in self.proposals:
            if b.entries[t] == UNKNOWN:
                return t
        return None

    def satisfied(self, b: PartialAssignment) -> bool:
        return bool(self.predicate(b))


def ones_predicate(k):
    """Satisfied once k positive outcomes are known."""
    return lambda b: b.num_ones >= k


def zeros_predicate(z):
    """Satisfied once z negative outcomes are known."""
    return lambda b: b.num_zeros >= z


class RoundRobinStrategy:
    """Cost-balanced interleave of several substrategies over shared outcomes.

    Each round every unsatisfied substrategy proposes its next unanswered
    test; the one minimizing accumulated-cost-plus-proposal runs (ties to the
    lowest substrategy index, charging the cost to it alone).  Mode ALL runs
    until every predicate holds, mode ANY until the first does.
    """

    def __init__(self, substrategies, mode, instance: Instance):
        if len(substrategies) < 1:
            raise ParameterError("need at least one substrategy")
        if mode not in (MODE_ALL, MODE_ANY):
            raise ParameterError(f"mode must be {MODE_ALL} or {MODE_ANY}, got {mode!r}")
        self.substrategies = tuple(substrategies)
        self.mode = mode
        self.instance = instance

    def _stopped(self, state: PartialAssignment) -> bool:
        sat = [sub.satisfied(state) for sub in self.substrategies]
        return any(sat) if self.mode == MODE_ANY else all(sat)

    def _replay(self, b: PartialAssignment):
        """Re-run the interleave against known outcomes in ``b``.

        Returns the first test whose outcome is still unknown, or None once
        the round robin has stopped on the available knowledge.
        """
        n = self.instance.n
        costs = self.instance.costs
        state = PartialAssignment.all_unknown(n)
        spent = [0.0] * len(self.substrategies)
        while not self._stopped(state):
            best = None
            for i, sub in enumerate(self.substrategies):
                if sub.satisfied(state):
                    continue
                t = sub.next_test(state)
                if t is None:
                    continue
                key = spent[i] + costs[t]
                if best is None or key < best[0]:
                    best = (key, i, t)
            if best is None:
                return None
            _, i, t = best
            if b.entries[t] == UNKNOWN:
                return t
            spent[i] += costs[t]
            state = state.with_value(t, b.entries[t])
        return None

    def finished(self, b: PartialAssignment) -> bool:
        return self._replay(b) is None

    def next_test(self, b: PartialAssignment) -> int:
        t = self._replay(b)
        if t is None:
            raise InternalDefectError("round robin already stopped")
        return t

    def describe(self) -> str:
        return f"mrr mode={self.mode} M={len(self.substrategies)}"


def modified_round_robin(substrategies, mode, instance: Instance) -> RoundRobinStrategy:
    return RoundRobinStrategy(substrategies, mode, instance)


def nonadaptive_rr(instance: Instance) -> Permutation:
    """Outcome-independent interleave of the two ratio orderings.

    Both orderings are fixed permutations and the cost-balance rule consults
    costs only, so the interleave itself is a permutation; execution then
    halts at class determination.  Ties go to the cheap-zeros side.
    """
    if not instance.is_unweighted:
        raise UnsupportedModeError("the round-robin interleave requires unit weights")
    sigma1, sigma0 = sigma_orderings(instance)
    orders = (sigma0.order, sigma1.order)
    costs = instance.costs
    spent = [0.0, 0.0]
    ptr = [0, 0]
    queried = set()
    out = []
    for _ in range(instance.n):
        best = None
        for side in (0, 1):
            o = orders[side]
            while ptr[side] < len(o) and o[ptr[side]] in queried:
                ptr[side] += 1
            if ptr[side] < len(o):
                t = o[ptr[side]]
                key = spent[side] + costs[t]
                if best is None or key < best[0]:
                    best = (key, side, t)
        _, side, t = best
        spent[side] += costs[t]
        queried.add(t)
        out.append(t)
    return Permutation(tuple(out))


class RepeatedKofN:
    """Answer every cutoff's threshold question with the k-of-n policy.

    Thresholds are processed in increasing cutoff order, each replayed from a
    fresh internal state; globally cached outcomes are consulted for free, so
    no test is charged twice.  The class is the highest cutoff still met.
    """

    def __init__(self, instance: Instance):
        if not instance.is_unweighted:
            raise UnsupportedModeError("the repeated k-of-n strategy requires unit weights")
        self.instance = instance
        self.ks = instance.cutoffs[1:-1]
        s1, s0 = sigma_orderings(instance)
        self.idx1 = s1.order
        self.idx0 = s0.order

    def next_test(self, b: PartialAssignment) -> int:
        n = self.instance.n
        for k in self.ks:
            internal = 0
            io = 0
            iz = 0
            while io < k and iz < n - k + 1:
                t = _kofn_next(internal, io, iz, k, n, self.idx1, self.idx0)
                if b.entries[t] == UNKNOWN:
                    return t
                internal |= 1 << t
                if b.entries[t] == 1:
                    io += 1
                else:
                    iz += 1
        raise InternalDefectError("every threshold resolved yet a test was requested")

    def describe(self) -> str:
        return "b-minus-1"


def b_minus_1_adaptive(instance: Instance) -> RepeatedKofN:
    return RepeatedKofN(instance)
