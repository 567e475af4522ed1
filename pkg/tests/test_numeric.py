import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chernoffdp.distributions import LaplaceDistribution
from chernoffdp.divergences import neg_log_bhattacharyya
from chernoffdp.numeric import (
    NonConvergenceError,
    gauss_legendre_rule,
    integrate,
    maximize_concave,
    tensor_integrate,
)


class TestIntegrate:
    def test_constant(self):
        r = integrate(lambda x: 1.0, 0.0, 1.0)
        assert r.value == 1.0
        assert r.error_estimate >= 0
        assert r.evaluations > 0

    def test_laplace_normalisation(self):
        d = LaplaceDistribution(0, 1)
        r = integrate(d.eval, -40, 40, [0.0], 1e-10)
        assert abs(r.value - 1.0) < 1e-9
        assert r.error_estimate <= 1e-10

    def test_exponential(self):
        r = integrate(lambda x: math.exp(-x), 0, 40, (), 1e-10)
        assert abs(r.value - (1 - math.exp(-40))) < 1e-9
        assert abs(r.value - 1.0) < 1e-9

    def test_kink_split_helps(self):
        f = lambda x: abs(x - 0.3137)
        exact = (0.3137**2 + (1 - 0.3137) ** 2) / 2
        r = integrate(f, 0, 1, [0.3137], 1e-12)
        assert abs(r.value - exact) < 1e-12
        unsplit = integrate(f, 0, 1, [], 1e-12)
        assert r.evaluations < unsplit.evaluations

    def test_linearity(self):
        f = lambda x: math.exp(-abs(x)) * math.cos(x)
        tol = 1e-10
        a = integrate(f, -30, 30, [0.0], tol).value
        b = integrate(lambda x: 3.5 * f(x), -30, 30, [0.0], tol).value
        assert abs(b - 3.5 * a) <= 2 * tol * 3.5

    def test_depth_cap(self):
        with pytest.raises(NonConvergenceError):
            integrate(lambda x: 1.0 / math.sqrt(abs(x)) if x else 1e300, -1, 1, (), 1e-12, max_depth=8)

    @pytest.mark.parametrize("a,b", [(1.0, 1.0), (2.0, 1.0)])
    def test_bad_bounds(self, a, b):
        with pytest.raises(ValueError):
            integrate(lambda x: x, a, b)


class TestMaximizeConcave:
    def test_parabola(self):
        r = maximize_concave(lambda a: -((a - 0.3) ** 2), 0.0, 1.0, 1e-6)
        assert abs(r.argmax - 0.3) <= 1e-6
        assert 0.0 <= r.argmax <= 1.0
        assert r.bracket_width <= 1e-6

    def test_equal_scale_laplace_symmetric(self):
        p, q = LaplaceDistribution(0, 1), LaplaceDistribution(1.7, 1)
        r = maximize_concave(lambda a: neg_log_bhattacharyya(p, q, a, 1e-12), 1e-6, 1 - 1e-6, 1e-6)
        assert abs(r.argmax - 0.5) < 1e-3

    def test_constant(self):
        r = maximize_concave(lambda a: 2.5, -1.0, 3.0, 1e-6)
        assert -1.0 < r.argmax < 3.0
        assert r.max_value == 2.5

    def test_plateau_deterministic(self):
        g = lambda a: min(0.0, -(a - 0.2)) if a > 0.2 else min(0.0, a - 0.1)
        assert maximize_concave(g, 0, 1, 1e-8) == maximize_concave(g, 0, 1, 1e-8)

    @given(
        shift=st.floats(-5, 5),
        scale=st.floats(0.2, 5),
        peak=st.floats(0.05, 0.95),
    )
    def test_affine_reparameterisation(self, shift, scale, peak):
        tol = 1e-7
        g = lambda a: -((a - peak) ** 2) + 0.1 * math.log(1 + a)
        base = maximize_concave(g, 0, 1, tol)
        moved = maximize_concave(lambda y: g((y - shift) / scale), shift, shift + scale, tol * scale)
        assert abs((moved.argmax - shift) / scale - base.argmax) <= 2 * tol


class TestTensorIntegrate:
    def test_separable_gaussian_like(self):
        rule = gauss_legendre_rule(-40, 40, [0.0], panel_width=2.0, nodes=16)
        v = tensor_integrate(lambda x, y: 0.25 * np.exp(-np.abs(x) - np.abs(y)), [rule, rule])
        assert abs(v - 1.0) < 1e-12

    def test_dimension_limit(self):
        rule = gauss_legendre_rule(0, 1, nodes=4)
        with pytest.raises(ValueError):
            tensor_integrate(lambda *xs: 1.0, [rule] * 4)


@settings(max_examples=15, deadline=None)
@given(
    mu=st.floats(-3, 3),
    b0=st.floats(0.3, 3),
    b1=st.floats(0.3, 3),
)
def test_neg_log_bhattacharyya_is_concave(mu, b0, b1):
    p, q = LaplaceDistribution(0.0, b0), LaplaceDistribution(mu, b1)
    alphas = np.linspace(0.01, 0.99, 99)
    g = [neg_log_bhattacharyya(p, q, float(a), 1e-13) for a in alphas]
    for i in range(1, 98):
        assert g[i] >= 0.5 * (g[i - 1] + g[i + 1]) - 1e-9
