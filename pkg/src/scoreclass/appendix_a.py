"""Bundled verification-gap counterexample and its reproduction checks.

A four-test instance with outputs 0,1,1,0,0 over the possible scores.  The
cheapest evaluation tree (first test and its after-negative successor pinned,
the rest optimal) costs 14,618, yet pays 10,248.8 on assignments in the
middle block, while a strategy built to certify that block alone pays only
10,241.8 there.  Summed over blocks, optimal verification is strictly cheaper
than optimal evaluation, which cannot happen under unit costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Instance
from .oracle import MODE_BLOCK, adaptive_table, block_verification_opt, verification_opt

APPENDIX_A_INSTANCE = Instance(
    n=4,
    costs=(5000.0, 6000.0, 3000.0, 5000.0),
    probs=(0.1, 0.3, 0.9, 0.8),
    weights=(1, 1, 1, 1),
    cutoffs=(0, 1, 3, 5),
    labels=(0, 1, 0),
)

EXPECTED_TREE_COSTS = {
    (0, 1): 15529, (0, 2): 15259, (0, 3): 16042,
    (1, 0): 14881, (1, 2): 14643, (1, 3): 15616,
    (2, 0): 14618, (2, 1): 14670, (2, 3): 14623,
    (3, 0): 15394, (3, 1): 15616, (3, 2): 15406,
}
EXPECTED_OPTIMUM = 14618
EXPECTED_OPTIMUM_PAIR = (2, 0)
EXPECTED_MIDDLE_BLOCK_TREE_COST = 10248.8
EXPECTED_MIDDLE_BLOCK_VERIFICATION = 10241.8


def display_round(x: float, decimals: int = 0) -> float:
    """Round half away from zero, matching the expected values' display precision."""
    scale = 10 ** decimals
    return math.floor(abs(x) * scale + 0.5) / scale * (1 if x >= 0 else -1)


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    computed: object
    ok: bool


@dataclass(frozen=True)
class ReproductionReport:
    tree_rows: tuple
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self):
        out = ["root  left  expected-cost"]
        for root, left, cost in self.tree_rows:
            out.append(f"x{root}    x{left}    {cost:,.0f}")
        out.append("")
        for c in self.checks:
            tag = "PASS" if c.ok else "FAIL"
            out.append(f"{tag}  {c.name}: expected {c.expected}, computed {c.computed}")
        out.append("")
        out.append("RESULT " + ("PASS" if self.passed else "FAIL"))
        return out


def run_reproduction(instance: Instance = None) -> ReproductionReport:
    """Recompute every number of the bundled counterexample and compare.

    Comparisons happen at the displayed precision: whole units for the tree
    table, one decimal for the two middle-block costs.
    """
    inst = APPENDIX_A_INSTANCE if instance is None else instance
    table = adaptive_table(inst)
    checks = []
    rows = []
    pairs = sorted(EXPECTED_TREE_COSTS)
    constrained = {}
    for root, left in pairs:
        cost = table.constrained_root_left(root, left)
        constrained[(root, left)] = cost
        shown = display_round(cost)
        rows.append((root, left, shown))
        expected = EXPECTED_TREE_COSTS[(root, left)]
        checks.append(Check(f"tree cost root=x{root} left=x{left}",
                            expected, shown, shown == expected))

    optimum = table.expected_cost
    checks.append(Check("optimal evaluation cost", EXPECTED_OPTIMUM,
                        display_round(optimum),
                        display_round(optimum) == EXPECTED_OPTIMUM))
    best_pair = min(pairs, key=lambda rl: (constrained[rl], rl))
    checks.append(Check("optimal root/left pair", EXPECTED_OPTIMUM_PAIR, best_pair,
                        best_pair == EXPECTED_OPTIMUM_PAIR))

    middle = 2
    tree_block = table.cost_report().per_block[middle]
    shown_block = display_round(tree_block, 1)
    checks.append(Check("middle-block cost of the optimal tree",
                        EXPECTED_MIDDLE_BLOCK_TREE_COST, shown_block,
                        shown_block == EXPECTED_MIDDLE_BLOCK_TREE_COST))

    verif_block = block_verification_opt(inst, middle)
    shown_verif = display_round(verif_block, 1)
    checks.append(Check("optimal middle-block verification",
                        EXPECTED_MIDDLE_BLOCK_VERIFICATION, shown_verif,
                        shown_verif == EXPECTED_MIDDLE_BLOCK_VERIFICATION))

    checks.append(Check("verification beats the tree on the middle block",
                        "verification < tree cost",
                        f"{shown_verif} < {shown_block}",
                        verif_block < tree_block))

    total_verif = verification_opt(inst, MODE_BLOCK)
    checks.append(Check("total block verification below optimal evaluation",
                        "verification < evaluation",
                        f"{display_round(total_verif, 1)} < {display_round(optimum, 1)}",
                        total_verif < optimum))

    return ReproductionReport(tuple(rows), tuple(checks))
