"""Core problem model: instances, knowledge states, and the termination predicate.

An instance bundles n independent binary tests (each with a cost, a success
probability, and an integer weight) together with a strictly increasing cutoff
list that slices the achievable scores into contiguous classes.  Every strategy
in this package queries tests until the class of the final score is a foregone
conclusion; ``is_determined`` is that shared stopping rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OutOfRangeError, ParameterError, UnsupportedModeError

UNKNOWN = -1

_INSTANCE_KEYS = {"n", "costs", "probs", "weights", "cutoffs", "labels"}


@dataclass(frozen=True)
class Instance:
    """An immutable score classification problem.

    ``cutoffs`` has B+1 entries: class j (1-based) covers the scores in
    [cutoffs[j-1], cutoffs[j]).  The first cutoff must be 0 and the last must
    be one past the maximum achievable score.  ``labels`` optionally assigns an
    output value to each class; adjacent classes must then carry different
    labels so that classes remain maximal runs of equal output.
    """

    n: int
    costs: tuple
    probs: tuple
    weights: tuple
    cutoffs: tuple
    labels: tuple | None = None

    def __post_init__(self):
        n = self.n
        if not isinstance(n, int) or n < 1:
            raise ParameterError(f"n must be a positive integer, got {n!r}")
        for name, seq in (("costs", self.costs), ("probs", self.probs),
                          ("weights", self.weights)):
            if len(seq) != n:
                raise ParameterError(f"{name} must have length n={n}, got {len(seq)}")
        if any(c <= 0 for c in self.costs):
            raise ParameterError("all costs must be strictly positive")
        if any(not (0.0 < p < 1.0) for p in self.probs):
            raise ParameterError("all probabilities must lie strictly inside (0, 1)")
        if any(not isinstance(w, int) or w < 0 for w in self.weights):
            raise ParameterError("weights must be non-negative integers")
        cuts = self.cutoffs
        if len(cuts) < 3:
            raise ParameterError("need at least two classes (three cutoffs)")
        if any(not isinstance(a, int) for a in cuts):
            raise ParameterError("cutoffs must be integers")
        if any(a >= b for a, b in zip(cuts, cuts[1:])):
            raise ParameterError(f"cutoffs must be strictly increasing, got {cuts}")
        w_total = sum(self.weights)
        if cuts[0] != 0:
            raise ParameterError(f"first cutoff must equal the minimum score 0, got {cuts[0]}")
        if cuts[-1] != w_total + 1:
            raise ParameterError(
                f"last cutoff must be max score + 1 = {w_total + 1}, got {cuts[-1]}")
        if self.labels is not None:
            if len(self.labels) != self.num_classes:
                raise ParameterError(
                    f"labels must have one entry per class ({self.num_classes}), "
                    f"got {len(self.labels)}")
            if any(a == b for a, b in zip(self.labels, self.labels[1:])):
                raise ParameterError("adjacent classes must carry different labels")

    @property
    def num_classes(self) -> int:
        return len(self.cutoffs) - 1

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1 for w in self.weights)

    def label_of_class(self, j: int):
        """Output value of class j (1-based); the class index itself by default."""
        return j if self.labels is None else self.labels[j - 1]


@dataclass(frozen=True)
class PartialAssignment:
    """Knowledge state: per-test outcome in {0, 1, UNKNOWN}."""

    entries: tuple

    def __post_init__(self):
        if any(e not in (0, 1, UNKNOWN) for e in self.entries):
            raise ParameterError("entries must be 0, 1, or UNKNOWN")

    @classmethod
    def all_unknown(cls, n: int) -> "PartialAssignment":
        return cls((UNKNOWN,) * n)

    @classmethod
    def from_bits(cls, bits) -> "PartialAssignment":
        return cls(tuple(int(b) for b in bits))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def num_ones(self) -> int:
        return self.entries.count(1)

    @property
    def num_zeros(self) -> int:
        return self.entries.count(0)

    @property
    def num_unknown(self) -> int:
        return self.entries.count(UNKNOWN)

    @property
    def is_complete(self) -> bool:
        return UNKNOWN not in self.entries

    def with_value(self, i: int, value: int) -> "PartialAssignment":
        if self.entries[i] != UNKNOWN:
            raise ParameterError(f"test {i} already has outcome {self.entries[i]}")
        if value not in (0, 1):
            raise ParameterError(f"outcome must be 0 or 1, got {value!r}")
        e = list(self.entries)
        e[i] = value
        return PartialAssignment(tuple(e))

    def extends(self, other: "PartialAssignment") -> bool:
        """True when this state agrees with ``other`` on every known entry of it."""
        return all(o == UNKNOWN or s == o
                   for s, o in zip(self.entries, other.entries))

    def queried_mask(self) -> int:
        m = 0
        for i, e in enumerate(self.entries):
            if e != UNKNOWN:
                m |= 1 << i
        return m


@dataclass(frozen=True)
class ScoreWindow:
    """Minimum and maximum final score achievable from a knowledge state."""

    lo: int
    hi: int


@dataclass(frozen=True)
class ValueVector:
    """Per-score outputs plus the maximal constant runs ("blocks") they form.

    ``values[s]`` is the output for a final score of s.  Each block is a
    (start, end_exclusive, value) triple; blocks tile the score range.
    """

    values: tuple
    blocks: tuple

    @classmethod
    def from_values(cls, values) -> "ValueVector":
        values = tuple(values)
        blocks = []
        start = 0
        for s in range(1, len(values) + 1):
            if s == len(values) or values[s] != values[start]:
                blocks.append((start, s, values[start]))
                start = s
        return cls(values, tuple(blocks))

    @property
    def is_constant(self) -> bool:
        return len(self.blocks) == 1


def classify(instance: Instance, score: int) -> int:
    """Return the 1-based class whose scoring interval contains ``score``."""
    cuts = instance.cutoffs
    if not cuts[0] <= score <= cuts[-1] - 1:
        raise OutOfRangeError(
            f"score {score} outside achievable range [{cuts[0]}, {cuts[-1] - 1}]")
    # cutoffs are sorted, so the class is where the score would insert.
    j = 1
    while cuts[j] <= score:
        j += 1
    return j


def score_window(instance: Instance, b: PartialAssignment) -> ScoreWindow:
    """Window of final scores achievable over all completions of ``b``."""
    _check_len(instance, b)
    lo = sum(w for w, e in zip(instance.weights, b.entries) if e == 1)
    hi = lo + sum(w for w, e in zip(instance.weights, b.entries) if e == UNKNOWN)
    return ScoreWindow(lo, hi)


def is_determined(instance: Instance, b: PartialAssignment):
    """Class index if every completion of ``b`` lands in the same class, else None.

    This is the universal stopping rule: querying continues exactly while the
    achievable score window straddles a cutoff.
    """
    w = score_window(instance, b)
    j = classify(instance, w.lo)
    return j if classify(instance, w.hi) == j else None


def value_vector(instance: Instance) -> ValueVector:
    """Outputs for every achievable score of an unweighted instance."""
    if not instance.is_unweighted:
        raise UnsupportedModeError("value vectors are defined for unweighted instances")
    values = [instance.label_of_class(classify(instance, s))
              for s in range(instance.n + 1)]
    return ValueVector.from_values(values)


def induced_value_vector(instance: Instance, b: PartialAssignment) -> ValueVector:
    """Value vector of the function left after fixing the known entries of ``b``.

    The result is the subvector of the full value vector from index
    num_ones(b) through n - num_zeros(b), reindexed from zero.
    """
    if not instance.is_unweighted:
        raise UnsupportedModeError("induced value vectors require an unweighted instance")
    _check_len(instance, b)
    full = value_vector(instance)
    lo = b.num_ones
    hi = instance.n - b.num_zeros
    return ValueVector.from_values(full.values[lo:hi + 1])


def _check_len(instance: Instance, b: PartialAssignment):
    if len(b) != instance.n:
        raise ParameterError(
            f"assignment has {len(b)} entries but the instance has {instance.n} tests")


# ---------------------------------------------------------------------------
# Instance file format: one JSON object per file, unknown keys rejected.
# ---------------------------------------------------------------------------

def parse_instance(obj: dict) -> Instance:
    if not isinstance(obj, dict):
        raise ParameterError("instance file must hold a single JSON object")
    unknown = set(obj) - _INSTANCE_KEYS
    if unknown:
        raise ParameterError(f"unknown instance keys: {sorted(unknown)}")
    for key in ("n", "costs", "probs", "cutoffs"):
        if key not in obj:
            raise ParameterError(f"instance file missing required key {key!r}")
    n = obj["n"]
    if not isinstance(n, int):
        raise ParameterError(f"n must be an integer, got {n!r}")
    weights = obj.get("weights", [1] * n)
    cutoffs = tuple(int(a) for a in obj["cutoffs"])
    if "labels" in obj:
        labels = tuple(obj["labels"])
    else:
        labels = tuple(range(1, len(cutoffs)))
    return Instance(
        n=n,
        costs=tuple(float(c) for c in obj["costs"]),
        probs=tuple(float(p) for p in obj["probs"]),
        weights=tuple(int(w) for w in weights),
        cutoffs=cutoffs,
        labels=labels,
    )


def instance_to_dict(instance: Instance) -> dict:
    out = {
        "n": instance.n,
        "costs": list(instance.costs),
        "probs": list(instance.probs),
        "weights": list(instance.weights),
        "cutoffs": list(instance.cutoffs),
    }
    if instance.labels is not None:
        out["labels"] = list(instance.labels)
    return out


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), sort_keys=True,
                      separators=(", ", ": ")) + "\n"


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(json.load(fh))


def save_instance(instance: Instance, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(instance))


@lru_cache(maxsize=256)
def _arrays(instance: Instance):
    """numpy views of an instance, cached because instances are immutable."""
    return (np.asarray(instance.costs, dtype=np.float64),
            np.asarray(instance.probs, dtype=np.float64),
            np.asarray(instance.weights, dtype=np.int64),
            np.asarray(instance.cutoffs, dtype=np.int64))
