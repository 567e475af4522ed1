"""Bayesian binary hypothesis testing between the two scenario laws.

The defender sees M i.i.d. outputs and applies the Bayes-optimal
likelihood-ratio rule. :func:`estimate_error_rates` measures the false
alarm, miss and average error rates by simulation, and
:func:`fit_error_exponent` fits log-rate against M to recover the decay
exponents that KL divergence and Chernoff information predict.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ._backend import kernels
from .distributions import Density, UndefinedRatioError
from .mechanism import AttackScenario

CHUNK_TRIALS = 1 << 15
MIN_ERROR_EVENTS = 100
Z95 = 1.96


class Hypothesis(enum.IntEnum):
    H0 = 0
    H1 = 1


class Which(str, enum.Enum):
    fa = "fa"
    miss = "miss"
    avg = "avg"


class DegenerateFitError(ValueError):
    """Too few error events to fit a line through log-rates."""


@dataclass(frozen=True)
class ErrorRates:
    p_fa: float
    p_miss: float
    p_e: float
    trials: int
    m: int
    ci_radius: float
    prior_alpha: float
    fa_events: int
    miss_events: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExponentFit:
    which: Which
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[int, float], ...]
    reference: float | None = None

    @property
    def exponent(self) -> float:
        return -self.slope

    @property
    def relative_error(self) -> float | None:
        if not self.reference:
            return None
        return abs(self.exponent - self.reference) / self.reference

    def as_dict(self) -> dict:
        return {
            "which": self.which.value,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "points": [list(p) for p in self.points],
            "reference": self.reference,
            "relative_error": self.relative_error,
        }


def decision_threshold(prior_alpha: float) -> float:
    """LLR threshold log(alpha / (1 - alpha)) for the Bayes rule."""
    return math.log(prior_alpha / (1.0 - prior_alpha))


def llr_decide(observations: Sequence[float], p0: Density, p1: Density, prior_alpha: float) -> Hypothesis:
    """Bayes decision under 0-1 loss. Ties go to H0."""
    if len(observations) == 0:
        raise ValueError("need at least one observation")
    total = 0.0
    for x in observations:
        l0, l1 = p0.log_eval(x), p1.log_eval(x)
        if l0 == -math.inf or l1 == -math.inf:
            raise UndefinedRatioError(f"zero density at observation {x!r}")
        total += l1 - l0
    return Hypothesis.H1 if total > decision_threshold(prior_alpha) else Hypothesis.H0


def _shard_sizes(trials: int, shards: int) -> list[int]:
    base, extra = divmod(trials, shards)
    return [base + (i < extra) for i in range(shards)]


def _count_h1_shard(s: AttackScenario, m: int, n: int, seed: int, hyp: int, shard: int) -> int:
    b = s.b
    gen_mu, gen_b = (0.0, b) if hyp == 0 else (s.delta_mu, s.theta * b)
    # for equal scales the LLR is confined to [-|dmu|/b, |dmu|/b]; clipping
    # removes rounding so that the atoms at the ends are exact
    clip = abs(s.delta_mu) / b if s.theta == 1 else math.inf
    thr = decision_threshold(s.prior_alpha)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(m, hyp, shard))))
    count = 0
    done = 0
    while done < n:
        rows = min(CHUNK_TRIALS, n - done)
        u = rng.random((rows, m)) - 0.5
        count += kernels.count_h1(u, gen_mu, gen_b, s.delta_mu, b, s.theta, thr, clip)
        done += rows
    return count


def estimate_error_rates(
    s: AttackScenario, m: int, trials: int, seed: int, shards: int = 1, workers: int = 1
) -> ErrorRates:
    """Simulate ``trials`` runs of M = ``m`` observations under each hypothesis.

    Shard k of hypothesis h draws from ``SeedSequence(seed, spawn_key=(m, h, k))``,
    so (seed, shards) fixes the result regardless of ``workers``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if trials < 1000:
        raise ValueError("trials must be >= 1000")
    if shards < 1:
        raise ValueError("shards must be >= 1")
    jobs = [
        (hyp, k, n)
        for hyp in (0, 1)
        for k, n in enumerate(_shard_sizes(trials, shards))
        if n > 0
    ]

    def run(job):
        hyp, k, n = job
        return hyp, _count_h1_shard(s, m, n, seed, hyp, k)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    fa = sum(c for hyp, c in results if hyp == 0)
    miss = trials - sum(c for hyp, c in results if hyp == 1)
    p_fa, p_miss = fa / trials, miss / trials
    a = s.prior_alpha
    ci = Z95 * max(math.sqrt(r * (1.0 - r) / trials) for r in (p_fa, p_miss))
    return ErrorRates(
        p_fa=p_fa,
        p_miss=p_miss,
        p_e=a * p_fa + (1.0 - a) * p_miss,
        trials=trials,
        m=m,
        ci_radius=ci,
        prior_alpha=a,
        fa_events=fa,
        miss_events=miss,
    )


def _events(r: ErrorRates, which: Which) -> tuple[int, float]:
    if which is Which.fa:
        return r.fa_events, r.p_fa
    if which is Which.miss:
        return r.miss_events, r.p_miss
    return r.fa_events + r.miss_events, r.p_e


def fit_rates(rates: Sequence[ErrorRates], which: Which | str, reference: float | None = None) -> ExponentFit:
    """Least-squares line through (m, log rate).

    Points with fewer than 100 error events are dropped; a zero rate
    anywhere, or fewer than three usable points, is a degenerate fit.
    """
    which = Which(which)
    pts = []
    for r in rates:
        events, rate = _events(r, which)
        if events == 0:
            raise DegenerateFitError(f"no {which.value} error events at m={r.m}; raise trials or shrink m")
        if events >= MIN_ERROR_EVENTS:
            pts.append((r.m, math.log(rate)))
    if len(pts) < 3:
        raise DegenerateFitError(
            f"only {len(pts)} grid points with >= {MIN_ERROR_EVENTS} {which.value} error events"
        )
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return ExponentFit(which, float(slope), float(intercept), min(max(r2, 0.0), 1.0), tuple(pts), reference)


def reference_exponents(s: AttackScenario, tol: float = 1e-10) -> dict[str, float]:
    """Exponents predicted for each rate: D(Q||P), D(P||Q) and C(P, Q), P the null law."""
    from .divergences import chernoff_numeric, kl_numeric
    from .mechanism import scenario_to_hypotheses

    p, q = scenario_to_hypotheses(s)
    return {
        "fa": kl_numeric(q, p, tol).value,
        "miss": kl_numeric(p, q, tol).value,
        "avg": chernoff_numeric(p, q, tol).value,
    }


def fit_error_exponent(
    s: AttackScenario,
    m_grid: Sequence[int],
    trials: int,
    seed: int,
    which: Which | str = Which.avg,
    shards: int = 1,
    workers: int = 1,
) -> ExponentFit:
    m_grid = list(m_grid)
    if len(m_grid) < 4 or any(b <= a for a, b in zip(m_grid, m_grid[1:])):
        raise ValueError("m_grid needs at least 4 strictly increasing values")
    rates = [estimate_error_rates(s, m, trials, seed, shards, workers) for m in m_grid]
    which = Which(which)
    return fit_rates(rates, which, reference_exponents(s)[which.value])
