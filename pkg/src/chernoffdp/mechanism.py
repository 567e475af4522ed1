"""Laplace mechanism, datasets, neighbouring datasets and attack scenarios."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .distributions import LaplaceDistribution, laplace_sample
from .errors import DomainError


@dataclass(frozen=True)
class Dataset:
    """Scalar records bounded to ``[lo, hi]``."""

    records: tuple[float, ...]
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"clamp bounds must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "records", tuple(float(r) for r in self.records))
        for i, r in enumerate(self.records):
            if not self.lo <= r <= self.hi:
                raise ValueError(f"record {i} = {r!r} outside [{self.lo}, {self.hi}]")

    @classmethod
    def clamped(cls, values, lo: float = 0.0, hi: float = 1.0) -> Dataset:
        return cls(tuple(min(max(float(v), lo), hi) for v in values), lo, hi)

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class LinearQuery:
    kind: Literal["sum", "count"] = "sum"
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.kind not in ("sum", "count"):
            raise ValueError(f"unknown query kind {self.kind!r}")
        if not self.lo < self.hi:
            raise ValueError("clamp bounds must satisfy lo < hi")

    def sensitivity(self) -> float:
        if self.kind == "count":
            return 1.0
        # covers both replacement (hi - lo) and insertion/deletion (max |v|)
        return max(self.hi - self.lo, abs(self.lo), abs(self.hi))

    def __call__(self, d: Dataset) -> float:
        if self.kind == "count":
            return float(len(d.records))
        return math.fsum(min(max(r, self.lo), self.hi) for r in d.records)


@dataclass(frozen=True)
class AttackScenario:
    """Null Lap(0, b) against attacked Lap(delta_mu, theta * b), b = s / epsilon.

    ``prior_alpha`` is the prior weight of the null hypothesis.
    """

    epsilon: float
    sensitivity: float = 1.0
    delta_mu: float = 0.0
    theta: float = 1.0
    prior_alpha: float = 0.5

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon!r}")
        if not self.sensitivity > 0:
            raise DomainError(f"sensitivity must be positive, got {self.sensitivity!r}")
        if not math.isfinite(self.delta_mu):
            raise DomainError("delta_mu must be finite")
        if not self.theta >= 1:
            raise DomainError(f"theta must be >= 1, got {self.theta!r}")
        if not 0 < self.prior_alpha < 1:
            raise DomainError(f"prior_alpha must lie in (0, 1), got {self.prior_alpha!r}")

    @property
    def b(self) -> float:
        return self.sensitivity / self.epsilon

    @classmethod
    def from_multiplier(cls, epsilon, multiplier, sensitivity=1.0, theta=1.0, prior_alpha=0.5):
        return cls(epsilon, sensitivity, multiplier * sensitivity, theta, prior_alpha)


def laplace_mechanism(d: Dataset, q: LinearQuery, eps: float, rng: np.random.Generator) -> float:
    """Release q(d) + Lap(0, s / eps)."""
    if not eps > 0:
        raise DomainError(f"epsilon must be positive, got {eps!r}")
    noise = LaplaceDistribution(0.0, q.sensitivity() / eps)
    return q(d) + laplace_sample(noise, rng)


def apply_attack(d: Dataset, insert: float | None = None, delete_index: int | None = None) -> Dataset:
    """Return the neighbour of ``d`` with one record inserted or deleted."""
    if (insert is None) == (delete_index is None):
        raise ValueError("specify exactly one of insert / delete_index")
    if insert is not None:
        if not d.lo <= insert <= d.hi:
            raise ValueError(f"inserted value {insert!r} outside [{d.lo}, {d.hi}]")
        return Dataset(d.records + (float(insert),), d.lo, d.hi)
    if not 0 <= delete_index < len(d.records):
        raise IndexError(f"delete_index {delete_index} out of range for {len(d.records)} records")
    recs = d.records[:delete_index] + d.records[delete_index + 1 :]
    return Dataset(recs, d.lo, d.hi)


def scenario_to_hypotheses(s: AttackScenario) -> tuple[LaplaceDistribution, LaplaceDistribution]:
    b = s.b
    return LaplaceDistribution(0.0, b), LaplaceDistribution(s.delta_mu, s.theta * b)


def load_dataset(path: str | os.PathLike, lo: float = 0.0, hi: float = 1.0) -> Dataset:
    """Read one numeric record per line; blank lines are skipped.

    Values outside ``[lo, hi]`` are clamped. A line that does not parse as
    a finite number raises ``ValueError`` naming the line.
    """
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {text!r}") from None
            if not math.isfinite(v):
                raise ValueError(f"{path}:{lineno}: non-finite value {text!r}")
            values.append(v)
    return Dataset.clamped(values, lo, hi)
