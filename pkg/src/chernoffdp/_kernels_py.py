"""Pure numpy versions of the compiled kernels."""

import math

import numpy as np

from .distributions import laplace_from_uniform


def count_h1(u, gen_mu, gen_b, delta_mu, b, theta, threshold, clip):
    u = np.ascontiguousarray(u, dtype=np.float64)
    n, m = u.shape
    tb = theta * b
    logtheta = np.log(theta)
    s = np.zeros(n)
    # column-wise accumulation keeps the summation order of the compiled loop
    for j in range(m):
        x = laplace_from_uniform(u[:, j], gen_mu, gen_b)
        l = np.abs(x) / b - np.abs(x - delta_mu) / tb - logtheta
        s += np.clip(l, -clip, clip)
    return int(np.count_nonzero(s > threshold))


def laplace_pair_integral(kind, alpha, mu0, b0, mu1, b1, a, b, kinks, tol, max_depth=60):
    from .numeric import NonConvergenceError, integrate

    lc0 = -math.log(2.0 * b0)
    lc1 = -math.log(2.0 * b1)
    beta = 1.0 - alpha

    if kind == 0:
        def f(x):
            lp = lc0 - abs(x - mu0) / b0
            lq = lc1 - abs(x - mu1) / b1
            return math.exp(lp) * (lp - lq)
    else:
        def f(x):
            lp = lc0 - abs(x - mu0) / b0
            lq = lc1 - abs(x - mu1) / b1
            return math.exp(alpha * lp + beta * lq)

    try:
        r = integrate(f, a, b, kinks, tol, max_depth)
    except NonConvergenceError:
        return math.nan, math.inf, 0, False
    return r.value, r.error_estimate, r.evaluations, True
