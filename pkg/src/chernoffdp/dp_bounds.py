"""Relations between epsilon-DP, KL-DP and Chernoff-DP.

Covers the pure epsilon-DP level of a density pair, the KL bound implied
by epsilon-DP, the two Radon-Nikodym derivative models behind the Chernoff
bound (two-point and uniform-range), the optimal priors and the resulting
Chernoff upper bound, and sequential composition.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .distributions import TAIL_SCALES, Density, log_density_array
from .divergences import (
    ALPHA_HI,
    ALPHA_LO,
    bhattacharyya_alpha,
    chernoff_numeric,
    kl_numeric,
)
from .errors import DomainError
from .numeric import gauss_legendre_rule, maximize_concave, tensor_integrate


@dataclass(frozen=True)
class PrivacyBudget:
    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if not 0 <= self.delta <= 1:
            raise DomainError(f"delta must lie in [0, 1], got {self.delta!r}")

    def __add__(self, other: PrivacyBudget) -> PrivacyBudget:
        return PrivacyBudget(self.epsilon + other.epsilon, min(1.0, self.delta + other.delta))


def compose_budgets(budgets: Iterable[PrivacyBudget]) -> PrivacyBudget:
    """Simple sequential composition: epsilons and deltas add up.

    Valid when the composed mechanisms are conditionally independent given
    the data. The summed delta is capped at 1.
    """
    budgets = list(budgets)
    eps = math.fsum(b.epsilon for b in budgets)
    delta = math.fsum(b.delta for b in budgets)
    return PrivacyBudget(eps, min(1.0, delta))


# -- epsilon-DP level ---------------------------------------------------------


@dataclass(frozen=True)
class EvaluationGrid:
    """Nested symmetric grids ``centre +- 2**k * scale`` for k = 0..max_doublings.

    ``centre`` and ``scale`` default to values read off the densities.
    """

    centre: float | None = None
    scale: float | None = None
    points: int = 1025
    max_doublings: int = 10
    growth_tol: float = 1e-9


def _grid_defaults(p: Density, q: Density, grid: EvaluationGrid) -> tuple[float, float]:
    kinks = list(p.kink_points()) + list(q.kink_points())
    centre = grid.centre
    if centre is None:
        centre = 0.5 * (min(kinks) + max(kinks)) if kinks else 0.0
    scale = grid.scale
    if scale is None:
        widths = [(hi - lo) / (2.0 * TAIL_SCALES) for lo, hi in (p.integration_range(), q.integration_range())]
        scale = min(widths)
    return centre, scale


def epsilon_dp_level(p: Density, q: Density, grid: EvaluationGrid | None = None) -> float:
    """Smallest epsilon with |log dP/dQ| <= epsilon on the grid, or ``inf``.

    The sup of |log p - log q| is taken over nested grids whose half-width
    doubles from 1 to 2**max_doublings scale units; kink points are always
    included. If the maximum is still growing at the widest grid the ratio
    is declared unbounded and ``math.inf`` is returned. This is a
    heuristic: a ratio that grows only beyond the widest grid goes unseen.
    """
    grid = grid or EvaluationGrid()
    if p == q:
        return 0.0
    centre, scale = _grid_defaults(p, q, grid)
    kinks = sorted(set(p.kink_points()) | set(q.kink_points()))
    levels = []
    for k in range(grid.max_doublings + 1):
        half = scale * 2.0**k
        xs = np.concatenate(
            [np.linspace(centre - half, centre + half, grid.points), [k for k in kinks if abs(k - centre) <= half]]
        )
        lp, lq = log_density_array(p, xs), log_density_array(q, xs)
        dead_p, dead_q = np.isneginf(lp), np.isneginf(lq)
        if np.any(dead_p != dead_q):
            return math.inf
        live = ~dead_p
        levels.append(float(np.max(np.abs(lp[live] - lq[live]), initial=0.0)))
    last, prev = levels[-1], levels[-2]
    if last - prev > grid.growth_tol * max(1.0, prev):
        return math.inf
    return last


# -- KL bound -----------------------------------------------------------------


def kl_bound_from_epsilon(eps: float) -> float:
    """eps (e^eps - 1)(1 - e^-eps) / (e^eps - e^-eps); tight for the two-point law."""
    if eps < 0 or math.isnan(eps):
        raise DomainError(f"epsilon must be >= 0, got {eps!r}")
    if eps == 0:
        return 0.0
    if math.isinf(eps):
        return math.inf
    return eps * math.expm1(eps) * -math.expm1(-eps) / (2.0 * math.sinh(eps))


# -- Radon-Nikodym derivative models -----------------------------------------


class RnKind(str, enum.Enum):
    two_point = "two_point"
    uniform_range = "uniform_range"


@dataclass(frozen=True)
class RnDerivativeModel:
    """Law of Z = dP/dQ(X) on [e^-eps, e^eps].

    ``two_point`` puts mass p on e^eps and 1 - p on e^-eps with p chosen so
    that E[Z] = 1. ``uniform_range`` is unit Lebesgue measure on the range;
    it is *not* normalised (total mass e^eps - e^-eps).
    """

    kind: RnKind
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "kind", RnKind(self.kind))
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon!r}")

    @property
    def p_high(self) -> float:
        e = self.epsilon
        return -math.expm1(-e) / (2.0 * math.sinh(e))


def rn_expectation(model: RnDerivativeModel, exponent: float) -> float:
    """E[Z**exponent] under ``model`` (an integral of z**exponent for ``uniform_range``)."""
    e = model.epsilon
    if model.kind is RnKind.two_point:
        p = model.p_high
        return p * math.exp(exponent * e) + (1.0 - p) * math.exp(-exponent * e)
    k1 = exponent + 1.0
    if k1 == 0.0:
        return 2.0 * e
    return 2.0 * math.sinh(e * k1) / k1


def rn_z_log_z(model: RnDerivativeModel) -> float:
    """E[Z log Z] under ``model``."""
    e = model.epsilon
    if model.kind is RnKind.two_point:
        p = model.p_high
        return p * e * math.exp(e) - (1.0 - p) * e * math.exp(-e)
    # antiderivative z^2/2 log z - z^2/4
    def F(z):
        return 0.5 * z * z * math.log(z) - 0.25 * z * z

    return F(math.exp(e)) - F(math.exp(-e))


# -- optimal priors and the Chernoff upper bound -----------------------------


class Expansion(str, enum.Enum):
    q_based = "q_based"
    p_based = "p_based"


@dataclass(frozen=True)
class AlphaStar:
    value: float
    raw: float
    clamped: bool


def _check_open_unit(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1) for this bound, got {eps!r}")


def alpha_star_ub(eps: float, expansion: Expansion | str = Expansion.q_based) -> AlphaStar:
    """Optimal prior for the bounded Chernoff objective.

    q_based: atanh(eps)/eps - 1; p_based: atanh(eps)/eps. Values above 1
    are clamped to 1 and flagged.
    """
    _check_open_unit(eps)
    ratio = math.atanh(eps) / eps
    raw = ratio - 1.0 if Expansion(expansion) is Expansion.q_based else ratio
    if raw > 1.0:
        return AlphaStar(1.0, raw, True)
    return AlphaStar(raw, raw, False)


def chernoff_ub_objective(eps: float, alpha: float, expansion: Expansion | str) -> float:
    """Bounded Chernoff objective of the given expansion at prior ``alpha``.

    q_based: alpha + eps(alpha+1) - log(e^(2 eps (alpha+1)) - 1)
    p_based: alpha - 1 + eps alpha - log(e^(2 eps alpha) - 1)
    """
    if Expansion(expansion) is Expansion.q_based:
        k = alpha + 1.0
        return alpha + eps * k - math.log(math.expm1(2.0 * eps * k))
    return alpha - 1.0 + eps * alpha - math.log(math.expm1(2.0 * eps * alpha))


def chernoff_objective_exact(eps: float, alpha: float, expansion: Expansion | str) -> float:
    """-log C_alpha under the uniform-range model, before the log(1+x) <= x step."""
    if Expansion(expansion) is Expansion.q_based:
        k = alpha + 1.0
        return math.log(k) + eps * k - math.log(math.expm1(2.0 * eps * k))
    return math.log(alpha) + eps * alpha - math.log(math.expm1(2.0 * eps * alpha))


def chernoff_ub_route(eps: float, expansion: Expansion | str) -> float:
    """Bounded objective evaluated at that expansion's unclamped optimal prior."""
    a = alpha_star_ub(eps, expansion)
    return chernoff_ub_objective(eps, a.raw, expansion)


def chernoff_ub_from_epsilon(eps: float) -> float:
    """(1/(2 eps) + 1/2) log((1+eps)/(1-eps)) - 1 + log(2 eps / (1 - eps)), evaluated as written."""
    _check_open_unit(eps)
    L = 2.0 * math.atanh(eps)
    return (0.5 / eps + 0.5) * L - 1.0 + math.log(2.0 * eps / (1.0 - eps))


# -- composition check --------------------------------------------------------


@dataclass
class CompositionReport:
    alpha: float
    marginal_kl: list[float]
    product_kl: float
    marginal_c_alpha: list[float]
    product_c_alpha: float
    marginal_chernoff: list[float]
    product_chernoff: float
    product_alpha_star: float
    tol: float
    kl_additive: bool = field(init=False)
    c_alpha_multiplicative: bool = field(init=False)
    chernoff_subadditive: bool = field(init=False)

    def __post_init__(self):
        m = len(self.marginal_kl)
        self.kl_additive = abs(self.product_kl - self.kl_sum) <= m * self.tol
        self.c_alpha_multiplicative = abs(self.product_c_alpha - math.prod(self.marginal_c_alpha)) <= m * self.tol
        self.chernoff_subadditive = self.product_chernoff <= self.chernoff_sum + self.tol

    @property
    def kl_sum(self) -> float:
        return math.fsum(self.marginal_kl)

    @property
    def chernoff_sum(self) -> float:
        return math.fsum(self.marginal_chernoff)

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "marginal_kl": self.marginal_kl,
            "kl_sum": self.kl_sum,
            "product_kl": self.product_kl,
            "kl_additive": self.kl_additive,
            "marginal_c_alpha": self.marginal_c_alpha,
            "c_alpha_product_of_marginals": math.prod(self.marginal_c_alpha),
            "product_c_alpha": self.product_c_alpha,
            "c_alpha_multiplicative": self.c_alpha_multiplicative,
            "marginal_chernoff": self.marginal_chernoff,
            "chernoff_sum": self.chernoff_sum,
            "product_chernoff": self.product_chernoff,
            "product_alpha_star": self.product_alpha_star,
            "chernoff_subadditive": self.chernoff_subadditive,
            "tol": self.tol,
        }


class _ProductPair:
    """Joint log-densities of independent coordinates on a tensor grid."""

    # (nodes per panel, panels, fraction of the 1-D integration range kept);
    # three axes need a coarser grid to stay near 10**7 points
    _GRID = {1: (16, 40, 1.0), 2: (16, 40, 1.0), 3: (8, 25, 0.6)}

    def __init__(self, pairs: Sequence[tuple[Density, Density]]):
        if not 1 <= len(pairs) <= 3:
            raise ValueError("product-measure quadrature supports 1 to 3 pairs")
        nodes, panels, keep = self._GRID[len(pairs)]
        self.pairs = list(pairs)
        self.rules = []
        for p, q in pairs:
            pa, pb = p.integration_range()
            qa, qb = q.integration_range()
            a, b = min(pa, qa), max(pb, qb)
            c, h = 0.5 * (a + b), 0.5 * (b - a) * keep
            a, b = c - h, c + h
            kinks = sorted(set(p.kink_points()) | set(q.kink_points()))
            self.rules.append(gauss_legendre_rule(a, b, kinks, panel_width=(b - a) / panels, nodes=nodes))

    def _logs(self, coords):
        lp = sum(log_density_array(p, x) for (p, _), x in zip(self.pairs, coords))
        lq = sum(log_density_array(q, x) for (_, q), x in zip(self.pairs, coords))
        return lp, lq

    def kl(self) -> float:
        def f(*coords):
            lp, lq = self._logs(coords)
            return np.exp(lp) * (lp - lq)

        return tensor_integrate(f, self.rules)

    def c_alpha(self, alpha: float) -> float:
        def f(*coords):
            lp, lq = self._logs(coords)
            return np.exp(alpha * lp + (1.0 - alpha) * lq)

        return tensor_integrate(f, self.rules)


def verify_composition_additivity(
    pairs: Sequence[tuple[Density, Density]], tol: float = 1e-8, alpha: float = 0.5
) -> CompositionReport:
    """Compare divergences of a product measure with those of its marginals.

    Marginals go through the 1-D adaptive quadrature routes; the product is
    integrated on a tensor Gauss-Legendre grid, so the two sides share no
    code path beyond the densities themselves.
    """
    if not pairs:
        raise ValueError("need at least one pair")
    prod = _ProductPair(pairs)
    marg_kl = [kl_numeric(p, q, tol).value for p, q in pairs]
    marg_c = [bhattacharyya_alpha(p, q, alpha, tol) for p, q in pairs]
    marg_ch = [chernoff_numeric(p, q, tol).value for p, q in pairs]
    opt = maximize_concave(lambda a: -math.log(prod.c_alpha(a)), ALPHA_LO, ALPHA_HI, 1e-6)
    return CompositionReport(
        alpha=alpha,
        marginal_kl=marg_kl,
        product_kl=prod.kl(),
        marginal_c_alpha=marg_c,
        product_c_alpha=prod.c_alpha(alpha),
        marginal_chernoff=marg_ch,
        product_chernoff=max(opt.max_value, 0.0),
        product_alpha_star=opt.argmax,
        tol=tol,
    )
