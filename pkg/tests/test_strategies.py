"""Strategies: ratio orderings, k-of-n policy, round robins, repeated thresholds."""

import numpy as np
import pytest

from scoreclass import (Instance, PartialAssignment, Permutation, SubStrategy,
                        b_minus_1_adaptive, classify, enumeration_cost,
                        kofn_strategy, modified_round_robin,
                        nonadaptive_rr, ones_predicate, optimal_adaptive,
                        run_on_assignment, sigma_orderings, strategy_cost,
                        zeros_predicate, MODE_ALL, MODE_ANY)
from scoreclass.errors import ParameterError, UnsupportedModeError
from conftest import (all_assignments, assert_close, assignment_prob,
                      random_instance)


def two_class(n, costs, probs, k):
    return Instance(n=n, costs=costs, probs=probs, weights=(1,) * n,
                    cutoffs=(0, k, n + 1))


class TestSigmaOrderings:
    def test_unit_costs_sort_by_prob(self):
        inst = Instance(n=3, costs=(1.0,) * 3, probs=(0.9, 0.5, 0.1),
                        weights=(1,) * 3, cutoffs=(0, 2, 4))
        s1, s0 = sigma_orderings(inst)
        assert s1.order == (0, 1, 2)
        assert s0.order == (2, 1, 0)

    def test_counterexample_instance_ratios(self):
        inst = Instance(n=4, costs=(5000.0, 6000.0, 3000.0, 5000.0),
                        probs=(0.1, 0.3, 0.9, 0.8), weights=(1,) * 4,
                        cutoffs=(0, 1, 3, 5))
        s1, _ = sigma_orderings(inst)
        # ratios 50000, 20000, 3333.3, 6250
        assert s1.order == (2, 3, 1, 0)

    def test_ties_break_by_index(self):
        inst = Instance(n=4, costs=(2.0,) * 4, probs=(0.3,) * 4,
                        weights=(1,) * 4, cutoffs=(0, 2, 5))
        s1, s0 = sigma_orderings(inst)
        assert s1.order == (0, 1, 2, 3)
        assert s0.order == (0, 1, 2, 3)


class TestKofN:
    def test_single_test(self):
        inst = two_class(1, (3.0,), (0.4,), 1)
        k = kofn_strategy(inst, 1)
        assert k.next_test(PartialAssignment.all_unknown(1)) == 0
        assert_close(strategy_cost(inst, k).total, 3.0)

    def test_one_of_two(self):
        inst = two_class(2, (1.0, 1.0), (0.9, 0.5), 1)
        k = kofn_strategy(inst, 1)
        assert k.next_test(PartialAssignment.all_unknown(2)) == 0
        assert_close(strategy_cost(inst, k).total, 1.1)
        # brute force over both fixed orders confirms 1.1 is the better one
        costs = [strategy_cost(inst, Permutation(order)).total
                 for order in ((0, 1), (1, 0))]
        assert_close(min(costs), 1.1)
        assert_close(max(costs), 1.5)

    def test_parameter_errors(self):
        inst = two_class(2, (1.0, 1.0), (0.5, 0.5), 1)
        with pytest.raises(ParameterError):
            kofn_strategy(inst, 0)
        with pytest.raises(ParameterError):
            kofn_strategy(inst, 3)
        weighted = Instance(n=2, costs=(1.0, 1.0), probs=(0.5, 0.5),
                            weights=(2, 1), cutoffs=(0, 2, 4))
        with pytest.raises(UnsupportedModeError):
            kofn_strategy(weighted, 1)

    def test_matches_adaptive_optimum(self):
        rng = np.random.default_rng(10)
        for _ in range(40):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(1, n + 1))
            inst = two_class(n,
                             tuple(float(c) for c in rng.integers(1, 30, n)),
                             tuple(float(p) for p in rng.uniform(0.05, 0.95, n)),
                             k)
            cost = strategy_cost(inst, kofn_strategy(inst, k)).total
            assert_close(cost, optimal_adaptive(inst)[0], what=f"k={k}")

    def test_factored_cost_equals_enumeration(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            n = int(rng.integers(2, 8))
            k = int(rng.integers(1, n + 1))
            inst = two_class(n,
                             tuple(float(c) for c in rng.integers(1, 9, n)),
                             tuple(float(p) for p in rng.uniform(0.1, 0.9, n)),
                             k)
            strat = kofn_strategy(inst, k)
            fac = strategy_cost(inst, strat)
            enu = enumeration_cost(inst, strat)
            assert_close(fac.total, enu.total)
            for j in fac.per_block:
                assert_close(fac.per_block[j], enu.per_block[j])


def run_substrategy(instance, sub, bits):
    """Standalone run of one substrategy to its own predicate (or exhaustion)."""
    b = PartialAssignment.all_unknown(instance.n)
    cost = 0.0
    tests = []
    while not sub.satisfied(b):
        t = sub.next_test(b)
        if t is None:
            break
        b = b.with_value(t, bits[t])
        cost += instance.costs[t]
        tests.append(t)
    return cost, tuple(tests)


class TestModifiedRoundRobin:
    def test_single_substrategy_identity(self):
        inst = Instance(n=4, costs=(1.0, 2.0, 3.0, 4.0), probs=(0.5,) * 4,
                        weights=(1,) * 4, cutoffs=(0, 2, 5))
        sub = SubStrategy(proposals=(2, 0, 3, 1), predicate=ones_predicate(2))
        mrr = modified_round_robin([sub], MODE_ALL, inst)
        for bits in all_assignments(4):
            combined = run_on_assignment(inst, mrr, bits)
            _, solo_tests = run_substrategy(inst, sub, bits)
            # the executor additionally stops at class determination
            assert combined.tests == solo_tests[:len(combined.tests)]

    def test_unit_cost_alternation(self):
        # every score its own class, so nothing stops the interleave early
        inst = Instance(n=4, costs=(1.0,) * 4, probs=(0.5,) * 4,
                        weights=(1,) * 4, cutoffs=(0, 1, 2, 3, 4, 5))
        a = SubStrategy(proposals=(0, 1, 2, 3), predicate=ones_predicate(4))
        b = SubStrategy(proposals=(3, 2, 1, 0), predicate=zeros_predicate(4))
        mrr = modified_round_robin([a, b], MODE_ALL, inst)
        run = run_on_assignment(inst, mrr, (1, 0, 0, 1))
        # ties go to the first substrategy, outcomes shared, no repeats
        assert run.tests == (0, 3, 1, 2)

    def test_any_mode_stops_at_first_predicate(self):
        inst = Instance(n=4, costs=(1.0,) * 4, probs=(0.5,) * 4,
                        weights=(1,) * 4, cutoffs=(0, 1, 2, 3, 5))
        a = SubStrategy(proposals=(0, 1, 2, 3), predicate=ones_predicate(1))
        b = SubStrategy(proposals=(3, 2, 1, 0), predicate=zeros_predicate(3))
        any_mode = modified_round_robin([a, b], MODE_ANY, inst)
        all_mode = modified_round_robin([a, b], MODE_ALL, inst)
        bits = (1, 1, 1, 1)
        run_any = run_on_assignment(inst, any_mode, bits)
        run_all = run_on_assignment(inst, all_mode, bits)
        # first queried test is positive: the ones-predicate fires immediately
        assert run_any.decided_class is None
        assert len(run_any.tests) == 1
        assert len(run_all.tests) > len(run_any.tests)

    def test_cost_at_most_m_times_each_substrategy(self):
        # one substrategy proposes an expensive test, the other cheap ones
        inst = Instance(n=5, costs=(5.0, 1.0, 1.0, 1.0, 1.0), probs=(0.5,) * 5,
                        weights=(1,) * 5, cutoffs=(0, 2, 6))
        a = SubStrategy(proposals=(0, 1, 2, 3, 4), predicate=ones_predicate(2))
        b = SubStrategy(proposals=(1, 2, 3, 4, 0), predicate=zeros_predicate(4))
        mrr = modified_round_robin([a, b], MODE_ANY, inst)
        for bits in all_assignments(5):
            combined = run_on_assignment(inst, mrr, bits).cost
            cost_a, _ = run_substrategy(inst, a, bits)
            cost_b, _ = run_substrategy(inst, b, bits)
            assert combined <= 2 * cost_a + 1e-9
            assert combined <= 2 * cost_b + 1e-9

    def test_exhausted_substrategy_is_skipped(self):
        inst = Instance(n=3, costs=(1.0,) * 3, probs=(0.5,) * 3,
                        weights=(1,) * 3, cutoffs=(0, 2, 4))
        never = SubStrategy(proposals=(0,), predicate=lambda b: False)
        full = SubStrategy(proposals=(0, 1, 2), predicate=ones_predicate(3))
        mrr = modified_round_robin([never, full], MODE_ALL, inst)
        run = run_on_assignment(inst, mrr, (0, 1, 1))
        assert run.tests == (0, 1, 2)

    def test_mode_validation(self):
        inst = Instance(n=2, costs=(1.0,) * 2, probs=(0.5,) * 2,
                        weights=(1,) * 2, cutoffs=(0, 1, 3))
        with pytest.raises(ParameterError):
            modified_round_robin([], MODE_ALL, inst)
        sub = SubStrategy(proposals=(0, 1), predicate=ones_predicate(1))
        with pytest.raises(ParameterError):
            modified_round_robin([sub], "SOME", inst)


class TestNonadaptiveRR:
    def test_interleave_order(self):
        inst = Instance(n=3, costs=(1.0,) * 3, probs=(0.9, 0.5, 0.1),
                        weights=(1,) * 3, cutoffs=(0, 2, 4))
        assert nonadaptive_rr(inst).order == (2, 0, 1)

    def test_two_of_three_cost(self):
        inst = Instance(n=3, costs=(1.0,) * 3, probs=(0.9, 0.5, 0.1),
                        weights=(1,) * 3, cutoffs=(0, 2, 4))
        rr = nonadaptive_rr(inst)
        assert_close(strategy_cost(inst, rr).total, 2.82)
        # independent oracle: enumerate all 8 assignments
        total = 0.0
        for bits in all_assignments(3):
            total += assignment_prob(inst, bits) * run_on_assignment(inst, rr, bits).cost
        assert_close(total, 2.82)

    def test_all_tests_needed(self):
        inst = Instance(n=2, costs=(1.0, 1.0), probs=(0.3, 0.8),
                        weights=(1,) * 2, cutoffs=(0, 1, 2, 3))
        rr = nonadaptive_rr(inst)
        assert sorted(rr.order) == [0, 1]
        assert_close(strategy_cost(inst, rr).total, 2.0)

    def test_within_twice_each_sigma_walk(self):
        # per-assignment cost is at most twice either one-sided walk alone
        rng = np.random.default_rng(12)
        for _ in range(10):
            inst = random_instance(rng, 6, unit_costs=False, cost_hi=9)
            rr = nonadaptive_rr(inst)
            s1, s0 = sigma_orderings(inst)
            for bits in all_assignments(6):
                combined = run_on_assignment(inst, rr, bits).cost
                solo1 = run_on_assignment(inst, s1, bits).cost
                solo0 = run_on_assignment(inst, s0, bits).cost
                assert combined <= 2 * min(solo1, solo0) + 1e-9

    def test_weighted_rejected(self):
        inst = Instance(n=2, costs=(1.0, 1.0), probs=(0.5, 0.5),
                        weights=(2, 1), cutoffs=(0, 2, 4))
        with pytest.raises(UnsupportedModeError):
            nonadaptive_rr(inst)


class TestRepeatedKofN:
    def test_two_classes_match_kofn(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            n = int(rng.integers(2, 8))
            k = int(rng.integers(1, n + 1))
            inst = two_class(n,
                             tuple(float(c) for c in rng.integers(1, 9, n)),
                             tuple(float(p) for p in rng.uniform(0.1, 0.9, n)),
                             k)
            rep = b_minus_1_adaptive(inst)
            single = kofn_strategy(inst, k)
            for bits in all_assignments(n):
                assert (run_on_assignment(inst, rep, bits).tests
                        == run_on_assignment(inst, single, bits).tests)

    def test_highest_passed_threshold_wins(self):
        inst = Instance(n=4, costs=(1.0,) * 4, probs=(0.5,) * 4,
                        weights=(1,) * 4, cutoffs=(0, 1, 3, 5))
        run = run_on_assignment(inst, b_minus_1_adaptive(inst), (0, 1, 1, 0))
        assert run.decided_class == 2

    def test_classifies_every_assignment(self):
        rng = np.random.default_rng(14)
        for _ in range(15):
            inst = random_instance(rng, int(rng.integers(2, 9)), unit_costs=False)
            rep = b_minus_1_adaptive(inst)
            for bits in all_assignments(inst.n):
                run = run_on_assignment(inst, rep, bits)
                score = sum(bits)
                assert run.decided_class == classify(inst, score)

    def test_factored_matches_enumeration(self):
        rng = np.random.default_rng(15)
        for _ in range(8):
            inst = random_instance(rng, int(rng.integers(3, 9)), unit_costs=False)
            rep = b_minus_1_adaptive(inst)
            fac = strategy_cost(inst, rep)
            enu = enumeration_cost(inst, rep)
            assert_close(fac.total, enu.total)
            for j in fac.per_block:
                assert_close(fac.per_block[j], enu.per_block[j])

    def test_bound_against_adaptive_optimum(self):
        rng = np.random.default_rng(16)
        for _ in range(25):
            inst = random_instance(rng, int(rng.integers(3, 9)), unit_costs=False)
            cost = strategy_cost(inst, b_minus_1_adaptive(inst)).total
            opt = optimal_adaptive(inst)[0]
            assert cost <= (inst.num_classes - 1) * opt + 1e-9


class TestPermutation:
    def test_validation(self):
        with pytest.raises(ParameterError):
            Permutation((0, 0, 1))
        with pytest.raises(ParameterError):
            Permutation((1, 2))

    def test_describe(self):
        assert Permutation((2, 0, 1)).describe() == "perm 2,0,1"
