"""Shannon information calculus for small discrete joint distributions (bits)."""
from __future__ import annotations

import csv
import json
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

SIMPLEX_TOL = 1e-9


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class DiscreteDistribution:
    """Joint distribution over 1 to 3 variables.

    ``outcomes`` is a sequence of equal-length tuples, ``probs`` the matching
    probabilities.  Repeated outcomes are rejected.
    """

    outcomes: tuple
    probs: np.ndarray

    def __post_init__(self):
        outcomes = tuple(tuple(o) for o in self.outcomes)
        probs = np.asarray(self.probs, dtype=float)
        if not outcomes:
            raise DistributionError("distribution has no outcomes")
        if probs.shape != (len(outcomes),):
            raise DistributionError("one probability per outcome is required")
        arity = len(outcomes[0])
        if not 1 <= arity <= 3:
            raise DistributionError(f"1 to 3 variables supported, got {arity}")
        for k, o in enumerate(outcomes):
            if len(o) != arity:
                raise DistributionError(f"outcome {k + 1} has {len(o)} variables, expected {arity}")
        if len(set(outcomes)) != len(outcomes):
            raise DistributionError("repeated outcome")
        bad = np.flatnonzero(~np.isfinite(probs) | (probs < 0))
        if bad.size:
            raise DistributionError(f"outcome {bad[0] + 1}: probability must be finite and >= 0")
        if abs(probs.sum() - 1.0) > SIMPLEX_TOL:
            raise DistributionError(f"probabilities sum to {probs.sum():.12g}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probs", probs)

    @property
    def arity(self):
        return len(self.outcomes[0])

    def marginal(self, subset):
        """Probabilities of the marginal on the variable indices in ``subset``."""
        subset = tuple(subset)
        if not subset or len(set(subset)) != len(subset) or \
                any(not 0 <= i < self.arity for i in subset):
            raise DistributionError(f"invalid variable subset {subset} for arity {self.arity}")
        acc = defaultdict(float)
        for o, p in zip(self.outcomes, self.probs):
            acc[tuple(o[i] for i in subset)] += p
        return np.array(list(acc.values()))

    @classmethod
    def from_mapping(cls, mapping):
        items = list(mapping.items())
        return cls(tuple(o if isinstance(o, tuple) else (o,) for o, _ in items),
                   [p for _, p in items])


def _parse_prob(text, where):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise DistributionError(f"{where}: cannot parse probability {text!r}") from None


def load_distribution(path):
    """Read a distribution from CSV or JSON.

    CSV: a header row, then one row per outcome with the variable values
    followed by the probability in the last column.  JSON: either a list
    of ``{"outcome": [...], "p": x}`` objects or an object
    ``{"outcomes": [[...], ...], "probs": [...]}``.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict):
            outcomes, probs = data.get("outcomes"), data.get("probs")
            if outcomes is None or probs is None:
                raise DistributionError("JSON object needs 'outcomes' and 'probs'")
            probs = [_parse_prob(p, f"entry {k + 1}") for k, p in enumerate(probs)]
        else:
            outcomes, probs = [], []
            for k, row in enumerate(data):
                if "outcome" not in row or "p" not in row:
                    raise DistributionError(f"entry {k + 1}: needs 'outcome' and 'p'")
                outcomes.append(tuple(row["outcome"]))
                probs.append(_parse_prob(row["p"], f"entry {k + 1}"))
        return DiscreteDistribution(tuple(tuple(o) for o in outcomes), probs)

    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise DistributionError("CSV needs a header and at least one outcome row")
    width = len(rows[0])
    outcomes, probs = [], []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise DistributionError(f"row {k}: expected {width} fields, got {len(row)}")
        outcomes.append(tuple(row[:-1]))
        probs.append(_parse_prob(row[-1], f"row {k}"))
    return DiscreteDistribution(tuple(outcomes), probs)


def _entropy(p):
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def shannon_entropy(d, marginal=None):
    """Entropy in bits of the marginal on ``marginal`` (all variables by default)."""
    subset = range(d.arity) if marginal is None else marginal
    return _entropy(d.marginal(subset))


def _require(d, arity):
    if d.arity != arity:
        raise DistributionError(f"expected {arity} variables, got {d.arity}")


def mutual_information_2(d):
    """``H1 + H2 - H12``."""
    _require(d, 2)
    return (shannon_entropy(d, (0,)) + shannon_entropy(d, (1,))
            - shannon_entropy(d, (0, 1)))


def configurational_information_3(d):
    """Three-way interaction information by inclusion-exclusion; either sign."""
    _require(d, 3)
    total = 0.0
    for r in (1, 2, 3):
        sign = 1.0 if r % 2 else -1.0
        total += sign * sum(shannon_entropy(d, s) for s in combinations(range(3), r))
    return total


def mutual_redundancy(d, scale=1.0):
    """``-scale * T12`` for two variables, ``scale * T123`` for three."""
    if d.arity == 2:
        return -scale * mutual_information_2(d)
    if d.arity == 3:
        return scale * configurational_information_3(d)
    raise DistributionError(f"redundancy needs 2 or 3 variables, got {d.arity}")


def redundancy_fraction(h, h_max):
    """Share of the maximal uncertainty that is not realized, ``(h_max - h) / h_max``."""
    if not h_max > 0:
        raise ValueError("h_max must be positive")
    if h > h_max or h < 0:
        raise ValueError(f"need 0 <= h <= h_max, got h={h}, h_max={h_max}")
    return (h_max - h) / h_max


@dataclass(frozen=True)
class SynergyVectors:
    P: tuple
    Q: tuple

    def __post_init__(self):
        for name in ("P", "Q"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, tuple(float(c) for c in v))


def synergy_balance(v):
    """``|P|^2 - |Q|^2``; positive when P dominates."""
    return float(np.dot(v.P, v.P) - np.dot(v.Q, v.Q))
