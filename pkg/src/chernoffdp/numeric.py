"""Quadrature and one-dimensional search kernels."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

DEFAULT_MAX_DEPTH = 60
_MIN_DEPTH = 4
# Richardson corrections this close to the local value are roundoff
_ROUNDOFF = 16.0 * 2.0**-52


class NonConvergenceError(ArithmeticError):
    """Adaptive refinement hit its depth cap before meeting the tolerance."""


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class OptimizeResult:
    argmax: float
    max_value: float
    iterations: int
    bracket_width: float


def _pieces(a: float, b: float, kinks: Sequence[float]) -> list[tuple[float, float]]:
    cuts = [a] + [k for k in sorted(kinks) if a < k < b] + [b]
    return [(lo, hi) for lo, hi in zip(cuts, cuts[1:]) if hi > lo]


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    kinks: Sequence[float] = (),
    tol: float = 1e-10,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> QuadratureResult:
    """Adaptive Simpson quadrature of ``f`` over ``[a, b]``.

    The interval is split at every kink first so each piece is smooth, and
    each piece receives a share of ``tol`` proportional to its length.
    A subinterval is accepted once the Richardson estimate
    ``|S_fine - S_coarse| / 15`` drops below its local tolerance, or below
    16 ulps of the local value when the requested tolerance is finer than
    double precision can resolve. The accepted value carries the Richardson
    correction.

    Raises:
        ValueError: on an empty interval or non-positive tolerance.
        NonConvergenceError: if any branch needs more than ``max_depth``
            bisections.
    """
    if not a < b:
        raise ValueError(f"integration bounds must satisfy a < b, got [{a}, {b}]")
    if not tol > 0:
        raise ValueError("tol must be positive")

    evals = 0

    def fe(x: float) -> float:
        nonlocal evals
        evals += 1
        return f(x)

    def refine(lo, hi, flo, fmid, fhi, local_tol, depth):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = fe(lm)
        frm = fe(rm)
        # coarse estimate from this interval's own width: reusing the parent's
        # half-estimate lets midpoint rounding leak into the error estimate
        whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
        h = (hi - lo) / 12.0
        left = h * (flo + 4.0 * flm + fmid)
        right = h * (fmid + 4.0 * frm + fhi)
        delta = (left + right - whole) / 15.0
        if depth >= _MIN_DEPTH and (
            abs(delta) <= local_tol or abs(delta) <= _ROUNDOFF * abs(left + right)
        ):
            return left + right + delta, abs(delta)
        if depth >= max_depth:
            raise NonConvergenceError(
                f"adaptive Simpson exceeded {max_depth} levels near x={mid!r}"
            )
        lv, le = refine(lo, mid, flo, flm, fmid, 0.5 * local_tol, depth + 1)
        rv, re = refine(mid, hi, fmid, frm, fhi, 0.5 * local_tol, depth + 1)
        return lv + rv, le + re

    total = 0.0
    err = 0.0
    span = b - a
    for lo, hi in _pieces(a, b, kinks):
        flo, fhi = fe(lo), fe(hi)
        fmid = fe(0.5 * (lo + hi))
        v, e = refine(lo, hi, flo, fmid, fhi, tol * (hi - lo) / span, 0)
        total += v
        err += e
    return QuadratureResult(total, err, evals)


def maximize_concave(
    g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6
) -> OptimizeResult:
    """Golden-section search for the maximum of a concave ``g`` on [lo, hi].

    The bracket is shrunk until its width is at most ``tol``; the reported
    argmax is the final bracket midpoint, which keeps plateaus deterministic.
    """
    if not lo < hi:
        raise ValueError(f"search interval must satisfy lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise ValueError("tol must be positive")
    a, b = lo, hi
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    gc, gd = g(c), g(d)
    it = 0
    while b - a > tol:
        it += 1
        if gc < gd:
            a, c, gc = c, d, gd
            h = b - a
            d = a + INV_PHI * h
            gd = g(d)
        else:
            b, d, gd = d, c, gc
            h = b - a
            c = a + INV_PHI2 * h
            gc = g(c)
    x = 0.5 * (a + b)
    return OptimizeResult(argmax=x, max_value=g(x), iterations=it, bracket_width=b - a)


def gauss_legendre_rule(
    a: float, b: float, kinks: Sequence[float] = (), panel_width: float | None = None, nodes: int = 20
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b], broken at kinks."""
    cuts = {a, b}
    cuts.update(k for k in kinks if a < k < b)
    if panel_width is not None:
        n = max(1, int(math.ceil((b - a) / panel_width)))
        cuts.update(np.linspace(a, b, n + 1)[1:-1].tolist())
    edges = np.array(sorted(cuts))
    t, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * np.diff(edges)
    centre = 0.5 * (edges[:-1] + edges[1:])
    x = (centre[:, None] + half[:, None] * t[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return x, wt


def tensor_integrate(
    f: Callable[..., np.ndarray],
    rules: Sequence[tuple[np.ndarray, np.ndarray]],
    slab: int = 32,
) -> float:
    """Integrate a vectorized ``f(x_1, ..., x_k)`` on a tensor product of 1-D rules.

    ``f`` receives broadcastable coordinate arrays and must return the
    integrand on that block of the grid. The first axis is processed in
    slabs of ``slab`` nodes so memory stays bounded. Meant for k <= 3.
    """
    k = len(rules)
    if not 1 <= k <= 3:
        raise ValueError("tensor_integrate supports 1 to 3 dimensions")
    coords = []
    weight = np.ones((1,) * k)
    for i, (x, w) in enumerate(rules[1:], start=1):
        shape = [1] * k
        shape[i] = x.size
        coords.append(x.reshape(shape))
        weight = weight * w.reshape(shape)
    x0, w0 = rules[0]
    shape0 = [1] * k
    shape0[0] = -1
    parts = []
    for start in range(0, x0.size, slab):
        xs = x0[start : start + slab].reshape(shape0)
        ws = w0[start : start + slab].reshape(shape0)
        parts.append(float(np.sum(f(xs, *coords) * (ws * weight))))
    return math.fsum(parts)
