import math

import numpy as np
import pytest

from chernoffdp import _kernels_py
from chernoffdp._backend import BACKEND, kernels

compiled = pytest.mark.skipif(BACKEND != "cython", reason="compiled extension not built")


def _uniforms(rows, cols, seed):
    return np.random.default_rng(seed).random((rows, cols)) - 0.5


@compiled
@pytest.mark.parametrize("theta", [1.0, 1.5])
@pytest.mark.parametrize("gen", [(0.0, 1.0), (1.0, 1.5)])
def test_count_h1_parity(theta, gen):
    u = _uniforms(4096, 13, 1)
    clip = 1.0 if theta == 1.0 else math.inf
    args = (gen[0], gen[1], 1.0, 1.0, theta, 0.0, clip)
    assert kernels.count_h1(u, *args) == _kernels_py.count_h1(u, *args)


@compiled
@pytest.mark.parametrize("kind,alpha", [(0, 0.0), (1, 0.3), (1, 0.8)])
def test_pair_integral_parity(kind, alpha):
    args = (kind, alpha, 0.0, 1.0, 0.7, 2.0, -80.0, 80.7, [0.0, 0.7], 1e-10)
    v1, e1, n1, ok1 = kernels.laplace_pair_integral(*args)
    v2, e2, n2, ok2 = _kernels_py.laplace_pair_integral(*args)
    assert ok1 and ok2
    assert abs(v1 - v2) < 1e-13
    assert n1 == n2


def test_count_h1_threshold_extremes():
    u = _uniforms(100, 3, 2)
    assert kernels.count_h1(u, 0.0, 1.0, 1.0, 1.0, 1.0, -10.0, 1.0) == 100
    assert kernels.count_h1(u, 0.0, 1.0, 1.0, 1.0, 1.0, 10.0, 1.0) == 0


def test_fallback_forced(monkeypatch):
    import importlib

    import chernoffdp._backend as backend

    monkeypatch.setenv("CHERNOFFDP_PURE_PYTHON", "1")
    try:
        mod = importlib.reload(backend)
        assert mod.BACKEND == "python"
        assert mod.kernels is _kernels_py
    finally:
        monkeypatch.delenv("CHERNOFFDP_PURE_PYTHON")
        importlib.reload(backend)
