"""Shared test helpers: seeded instance generators and tolerance checks."""

import itertools

import numpy as np
import pytest

from scoreclass import Instance, PartialAssignment, backend_name
from scoreclass.model import UNKNOWN


def assert_close(a, b, tol=1e-9, what=""):
    """Absolute-or-relative closeness at the package-wide 1e-9 tolerance."""
    if abs(a - b) > tol * max(1.0, abs(a), abs(b)):
        raise AssertionError(f"{what} {a!r} != {b!r} (tol {tol})")


def random_instance(rng, n, num_classes=None, unit_costs=True, cost_hi=50,
                    p_lo=0.05, p_hi=0.95, labels=None, weight_hi=1):
    """Random valid instance; cutoffs are a sorted distinct subset of 1..max score."""
    if weight_hi > 1:
        weights = tuple(int(w) for w in rng.integers(1, weight_hi + 1, n))
    else:
        weights = (1,) * n
    w_total = sum(weights)
    if num_classes is None:
        num_classes = int(rng.integers(2, min(5, w_total) + 1))
    interior = np.sort(rng.choice(np.arange(1, w_total + 1),
                                  size=num_classes - 1, replace=False))
    cutoffs = (0,) + tuple(int(a) for a in interior) + (w_total + 1,)
    if unit_costs:
        costs = (1.0,) * n
    else:
        costs = tuple(float(c) for c in rng.integers(1, cost_hi + 1, n))
    probs = tuple(float(p) for p in rng.uniform(p_lo, p_hi, n))
    return Instance(n=n, costs=costs, probs=probs, weights=weights,
                    cutoffs=cutoffs, labels=labels)


def all_assignments(n):
    return itertools.product((0, 1), repeat=n)


def all_partial_assignments(n):
    for entries in itertools.product((0, 1, UNKNOWN), repeat=n):
        yield PartialAssignment(entries)


def assignment_prob(instance, bits):
    p = 1.0
    for pi, xi in zip(instance.probs, bits):
        p *= pi if xi else 1.0 - pi
    return p


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timed sections measure the algorithms."""
    rng = np.random.default_rng(0)
    inst = random_instance(rng, 4, num_classes=3, unit_costs=False)
    from scoreclass import (b_minus_1_adaptive, min_one_sided_block_cost,
                            nonadaptive_rr, optimal_adaptive,
                            optimal_nonadaptive, strategy_cost,
                            verification_opt, MODE_BLOCK)
    optimal_adaptive(inst)
    optimal_nonadaptive(inst)
    strategy_cost(inst, nonadaptive_rr(inst))
    strategy_cost(inst, b_minus_1_adaptive(inst))
    verification_opt(inst, MODE_BLOCK)
    min_one_sided_block_cost(inst, 1, 0)
    min_one_sided_block_cost(inst, 2, 1)
    two = random_instance(rng, 3, num_classes=2)
    from scoreclass import kofn_strategy
    strategy_cost(two, kofn_strategy(two, two.cutoffs[1]))


def numba_active():
    return backend_name() == "numba"
