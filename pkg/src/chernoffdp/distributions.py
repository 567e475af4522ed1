"""One-dimensional densities.

:class:`LaplaceDistribution` is the only concrete family. Anything that
implements the :class:`Density` protocol (evaluation, log-evaluation,
support, kink points, sampling) can be handed to the numerical divergence
routines, which is how tests plug in mixtures and other doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

# Tail truncation used for quadrature, in scale units. exp(-40) ~ 4e-18.
TAIL_SCALES = 40.0

# Smallest positive value of 1 - 2|u| for u drawn from [-1/2, 1/2).
_MIN_TAIL = 2.0**-53


class UndefinedRatioError(ValueError):
    """Raised when dP/dQ is requested where q vanishes but p does not."""


@runtime_checkable
class Density(Protocol):
    def eval(self, x: float) -> float: ...

    def log_eval(self, x: float) -> float: ...

    def support(self) -> tuple[float, float]: ...

    def kink_points(self) -> list[float]: ...

    def integration_range(self) -> tuple[float, float]: ...

    def sample(self, rng: np.random.Generator, size: int | None = None): ...


@dataclass(frozen=True)
class LaplaceDistribution:
    """Laplace law with location ``mu`` and scale ``b``."""

    mu: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (self.b > 0.0 and math.isfinite(self.b)):
            raise ValueError(f"Laplace scale must be positive and finite, got {self.b!r}")
        if not math.isfinite(self.mu):
            raise ValueError(f"Laplace location must be finite, got {self.mu!r}")

    def eval(self, x: float) -> float:
        return laplace_pdf(self, x)

    def log_eval(self, x: float) -> float:
        return -math.log(2.0 * self.b) - abs(x - self.mu) / self.b

    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def kink_points(self) -> list[float]:
        return [self.mu]

    def integration_range(self) -> tuple[float, float]:
        return (self.mu - TAIL_SCALES * self.b, self.mu + TAIL_SCALES * self.b)

    def cdf(self, x: float) -> float:
        z = (x - self.mu) / self.b
        if z < 0:
            return 0.5 * math.exp(z)
        return 1.0 - 0.5 * math.exp(-z)

    def quantile(self, q: float) -> float:
        if not 0.0 < q < 1.0:
            raise ValueError("quantile level must lie in (0, 1)")
        if q < 0.5:
            return self.mu + self.b * math.log(2.0 * q)
        return self.mu - self.b * math.log(2.0 * (1.0 - q))

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return laplace_sample(self, rng, size)


def laplace_pdf(d: LaplaceDistribution, x: float) -> float:
    """(1 / 2b) exp(-|x - mu| / b)."""
    return math.exp(-abs(x - d.mu) / d.b) / (2.0 * d.b)


def laplace_from_uniform(u, mu: float, b: float):
    """Inverse-CDF transform of ``u`` in [-1/2, 1/2) to Laplace(mu, b) draws.

    Works elementwise on arrays and on plain floats. The single endpoint
    u = -1/2 is nudged inward so the transform stays finite.
    """
    u = np.asarray(u, dtype=np.float64)
    t = np.maximum(1.0 - 2.0 * np.abs(u), _MIN_TAIL)
    x = mu - b * np.sign(u) * np.log(t)
    return x if x.ndim else float(x)


def laplace_sample(d: LaplaceDistribution, rng: np.random.Generator, size: int | None = None):
    """Draw from ``d`` with the inverse-CDF transform.

    The output depends only on the uniform stream of ``rng``, so a fixed
    seed reproduces the same sequence on every platform numpy supports.
    """
    u = rng.random(size) - 0.5
    return laplace_from_uniform(u, d.mu, d.b)


def log_density_ratio(p: Density, q: Density, x: float) -> float:
    """log p(x) - log q(x).

    Raises:
        UndefinedRatioError: if q(x) = 0 while p(x) > 0.
    """
    lq = q.log_eval(x)
    lp = p.log_eval(x)
    if lq == -math.inf:
        if lp == -math.inf:
            raise UndefinedRatioError(f"both densities vanish at x={x!r}")
        raise UndefinedRatioError(f"q(x)=0 < p(x) at x={x!r}")
    return lp - lq


def log_density_array(d: Density, x) -> np.ndarray:
    """``d.log_eval`` over an array, vectorized for Laplace densities."""
    x = np.asarray(x, dtype=np.float64)
    if isinstance(d, LaplaceDistribution):
        return -math.log(2.0 * d.b) - np.abs(x - d.mu) / d.b
    return np.array([d.log_eval(float(v)) for v in x.ravel()]).reshape(x.shape)
