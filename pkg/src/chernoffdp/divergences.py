"""KL divergence, skewed Bhattacharyya coefficients and Chernoff information.

Every quantity has a generic quadrature route that works for any
:class:`~chernoffdp.distributions.Density`, and the Laplace-pair quantities
also have closed forms. Values are in nats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ._backend import kernels
from .distributions import Density, LaplaceDistribution
from .errors import AbsoluteContinuityError, DomainError
from .mechanism import AttackScenario
from .numeric import NonConvergenceError, QuadratureResult, integrate, maximize_concave

ALPHA_LO = 1e-6
ALPHA_HI = 1.0 - 1e-6

CHERNOFF_FORMULA_NOTE = (
    "Laplace closed-form adaptation |dmu|/(theta b) - log(1 + |dmu|/(theta b)); "
    "differs from the numerical Chernoff information, see chernoff_numeric"
)


class Method(str, enum.Enum):
    closed_form = "closed_form"
    quadrature = "quadrature"
    monte_carlo = "monte_carlo"


@dataclass(frozen=True)
class DivergenceEstimate:
    value: float
    method: Method
    error_bound: float = 0.0
    alpha_star: float | None = None
    note: str | None = None

    @property
    def is_chernoff(self) -> bool:
        return self.alpha_star is not None


def _domain(p: Density, q: Density) -> tuple[float, float, list[float]]:
    pa, pb = p.integration_range()
    qa, qb = q.integration_range()
    kinks = sorted(set(p.kink_points()) | set(q.kink_points()))
    return min(pa, qa), max(pb, qb), kinks


def _laplace_quad(kind: int, alpha: float, p: LaplaceDistribution, q: LaplaceDistribution, tol: float):
    # compiled fast path for the integrands that dominate sweeps
    a, b, kinks = _domain(p, q)
    v, e, n, ok = kernels.laplace_pair_integral(kind, alpha, p.mu, p.b, q.mu, q.b, a, b, kinks, tol)
    if not ok:
        raise NonConvergenceError("adaptive Simpson hit its depth cap on a Laplace pair")
    return QuadratureResult(v, e, n)


def _both_laplace(p: Density, q: Density) -> bool:
    return isinstance(p, LaplaceDistribution) and isinstance(q, LaplaceDistribution)


def kl_numeric(p: Density, q: Density, tol: float = 1e-10) -> DivergenceEstimate:
    """D(p || q) = integral of p log(p / q), by adaptive quadrature.

    Raises:
        AbsoluteContinuityError: if some evaluated point has p > 0 = q.
    """
    if p == q:
        return DivergenceEstimate(0.0, Method.quadrature, 0.0)
    if _both_laplace(p, q):
        r = _laplace_quad(0, 0.0, p, q, tol)
        return DivergenceEstimate(r.value, Method.quadrature, r.error_estimate)
    a, b, kinks = _domain(p, q)

    def integrand(x: float) -> float:
        lp = p.log_eval(x)
        if lp == -math.inf:
            return 0.0
        lq = q.log_eval(x)
        if lq == -math.inf:
            raise AbsoluteContinuityError(f"p({x!r}) > 0 but q({x!r}) = 0")
        return math.exp(lp) * (lp - lq)

    r = integrate(integrand, a, b, kinks, tol)
    return DivergenceEstimate(r.value, Method.quadrature, r.error_estimate)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")


def _bhattacharyya(p: Density, q: Density, alpha: float, tol: float, form: str):
    if form == "direct" and _both_laplace(p, q):
        return _laplace_quad(1, alpha, p, q, tol)
    a, b, kinks = _domain(p, q)
    beta = 1.0 - alpha

    if form == "direct":
        # p^a q^(1-a) with respect to Lebesgue measure
        def f(x):
            lp, lq = p.log_eval(x), q.log_eval(x)
            if lp == -math.inf or lq == -math.inf:
                return 0.0
            return math.exp(alpha * lp + beta * lq)
    elif form == "q_based":
        # (p/q)^a dQ
        def f(x):
            lp, lq = p.log_eval(x), q.log_eval(x)
            if lq == -math.inf or lp == -math.inf:
                return 0.0
            return math.exp(alpha * (lp - lq)) * q.eval(x)
    elif form == "p_based":
        # (q/p)^(1-a) dP
        def f(x):
            lp, lq = p.log_eval(x), q.log_eval(x)
            if lp == -math.inf or lq == -math.inf:
                return 0.0
            return math.exp(beta * (lq - lp)) * p.eval(x)
    else:
        raise ValueError(f"unknown form {form!r}")
    return integrate(f, a, b, kinks, tol)


def bhattacharyya_alpha(p: Density, q: Density, alpha: float, tol: float = 1e-10) -> float:
    """Skewed Bhattacharyya coefficient C_alpha(p, q) = integral of p^alpha q^(1-alpha)."""
    _check_alpha(alpha)
    if p == q:
        return 1.0
    return _bhattacharyya(p, q, alpha, tol, "direct").value


def bhattacharyya_forms(p: Density, q: Density, alpha: float, tol: float = 1e-10) -> dict[str, float]:
    """C_alpha computed three ways: direct, as E_q[(p/q)^alpha], and as E_p[(q/p)^(1-alpha)]."""
    _check_alpha(alpha)
    return {
        form: _bhattacharyya(p, q, alpha, tol, form).value
        for form in ("direct", "q_based", "p_based")
    }


def neg_log_bhattacharyya(p: Density, q: Density, alpha: float, tol: float = 1e-10) -> float:
    return -math.log(bhattacharyya_alpha(p, q, alpha, tol))


def chernoff_numeric(
    p: Density, q: Density, tol: float = 1e-10, alpha_tol: float = 1e-6
) -> DivergenceEstimate:
    """Chernoff information max_alpha -log C_alpha(p, q).

    -log C_alpha is concave in alpha, so a golden-section search over
    [1e-6, 1 - 1e-6] finds the maximiser; it is returned as ``alpha_star``.
    """
    if p == q:
        return DivergenceEstimate(0.0, Method.quadrature, 0.0, alpha_star=0.5)
    errs = {}

    def g(alpha: float) -> float:
        r = _bhattacharyya(p, q, alpha, tol, "direct")
        errs[alpha] = r.error_estimate / r.value
        return -math.log(r.value)

    opt = maximize_concave(g, ALPHA_LO, ALPHA_HI, alpha_tol)
    bound = errs[opt.argmax] + tol
    return DivergenceEstimate(
        max(opt.max_value, 0.0), Method.quadrature, bound, alpha_star=opt.argmax
    )


def _laplace_args(delta_mu: float, b: float, theta: float) -> None:
    if not b > 0:
        raise DomainError(f"Laplace scale must be positive, got {b!r}")
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta!r}")


def kl_laplace(delta_mu: float, b: float, theta: float = 1.0) -> float:
    """D(Lap(0, b) || Lap(delta_mu, theta b))."""
    _laplace_args(delta_mu, b, theta)
    if delta_mu == 0 and theta == 1:
        return 0.0
    d = abs(delta_mu)
    return math.log(theta) - 1.0 + d / (theta * b) + math.exp(-d / b) / theta


def chernoff_laplace_formula(delta_mu: float, b: float, theta: float = 1.0) -> float:
    _laplace_args(delta_mu, b, theta)
    x = abs(delta_mu) / (theta * b)
    return x - math.log1p(x)


def chernoff_laplace_equal_scale(delta_mu: float, b: float) -> float:
    """Exact Chernoff information between Lap(0, b) and Lap(delta_mu, b).

    By mirror symmetry the optimal alpha is 1/2, and the piecewise
    integral gives C_1/2 = (1 + x) exp(-x) with x = |delta_mu| / (2b).
    """
    _laplace_args(delta_mu, b, 1.0)
    x = abs(delta_mu) / (2.0 * b)
    return x - math.log1p(x)


def kl_laplace_closed_form(s: AttackScenario) -> DivergenceEstimate:
    return DivergenceEstimate(kl_laplace(s.delta_mu, s.b, s.theta), Method.closed_form, 0.0)


def chernoff_laplace_closed_form(s: AttackScenario) -> DivergenceEstimate:
    """The closed-form Laplace Chernoff expression, evaluated as written.

    This is not the Chernoff information of the scenario pair in general;
    compare with :func:`chernoff_numeric` to see the gap.
    """
    v = chernoff_laplace_formula(s.delta_mu, s.b, s.theta)
    return DivergenceEstimate(v, Method.closed_form, 0.0, note=CHERNOFF_FORMULA_NOTE)
