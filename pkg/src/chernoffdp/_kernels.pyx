# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernels. Semantics match ``_kernels_py`` exactly."""

from libc.math cimport exp, fabs, log

cdef double MIN_TAIL = 2.0 ** -53
cdef double ROUNDOFF = 16.0 * 2.0 ** -52


def count_h1(const double[:, ::1] u, double gen_mu, double gen_b,
             double delta_mu, double b, double theta, double threshold,
             double clip):
    """Number of rows whose Laplace log-likelihood-ratio sum exceeds ``threshold``.

    Row i holds m uniforms on [-1/2, 1/2). Each is mapped to a draw of
    Lap(gen_mu, gen_b); the per-observation LLR of Lap(delta_mu, theta b)
    against Lap(0, b) is clipped to [-clip, clip] and summed along the row.
    """
    cdef Py_ssize_t n = u.shape[0], m = u.shape[1], i, j
    cdef double tb = theta * b
    cdef double logtheta = log(theta)
    cdef double s, t, x, l, uij, sg
    cdef long long count = 0
    with nogil:
        for i in range(n):
            s = 0.0
            for j in range(m):
                uij = u[i, j]
                t = 1.0 - 2.0 * fabs(uij)
                if t < MIN_TAIL:
                    t = MIN_TAIL
                if uij > 0.0:
                    sg = 1.0
                elif uij < 0.0:
                    sg = -1.0
                else:
                    sg = 0.0
                x = gen_mu - gen_b * sg * log(t)
                l = fabs(x) / b - fabs(x - delta_mu) / tb - logtheta
                if l > clip:
                    l = clip
                elif l < -clip:
                    l = -clip
                s += l
            if s > threshold:
                count += 1
    return count


# -- Laplace-pair adaptive Simpson --------------------------------------------

cdef struct PairSpec:
    int kind            # 0: p log(p/q), 1: p^alpha q^(1-alpha)
    double alpha
    double mu0, b0, lc0
    double mu1, b1, lc1
    long long evals
    int failed


cdef inline double _pair_f(PairSpec* ps, double x) noexcept nogil:
    cdef double lp = ps.lc0 - fabs(x - ps.mu0) / ps.b0
    cdef double lq = ps.lc1 - fabs(x - ps.mu1) / ps.b1
    ps.evals += 1
    if ps.kind == 0:
        return exp(lp) * (lp - lq)
    return exp(ps.alpha * lp + (1.0 - ps.alpha) * lq)


cdef void _refine(PairSpec* ps, double lo, double hi, double flo, double fmid, double fhi,
                  double tol, int depth, int max_depth,
                  double* val, double* err) noexcept nogil:
    cdef double mid = 0.5 * (lo + hi)
    cdef double lm = 0.5 * (lo + mid)
    cdef double rm = 0.5 * (mid + hi)
    cdef double flm = _pair_f(ps, lm)
    cdef double frm = _pair_f(ps, rm)
    cdef double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    cdef double h = (hi - lo) / 12.0
    cdef double left = h * (flo + 4.0 * flm + fmid)
    cdef double right = h * (fmid + 4.0 * frm + fhi)
    cdef double delta = (left + right - whole) / 15.0
    cdef double lv = 0.0, le = 0.0, rv = 0.0, re = 0.0
    if depth >= 4 and (fabs(delta) <= tol or fabs(delta) <= ROUNDOFF * fabs(left + right)):
        val[0] = left + right + delta
        err[0] = fabs(delta)
        return
    if depth >= max_depth:
        ps.failed = 1
        val[0] = left + right + delta
        err[0] = fabs(delta)
        return
    _refine(ps, lo, mid, flo, flm, fmid, 0.5 * tol, depth + 1, max_depth, &lv, &le)
    _refine(ps, mid, hi, fmid, frm, fhi, 0.5 * tol, depth + 1, max_depth, &rv, &re)
    val[0] = lv + rv
    err[0] = le + re


def laplace_pair_integral(int kind, double alpha, double mu0, double b0, double mu1, double b1,
                          double a, double b, kinks, double tol, int max_depth=60):
    """Adaptive Simpson of a Laplace-pair integrand over [a, b], split at ``kinks``.

    Returns (value, error_estimate, evaluations, converged).
    """
    cdef PairSpec ps
    ps.kind = kind
    ps.alpha = alpha
    ps.mu0 = mu0
    ps.b0 = b0
    ps.lc0 = -log(2.0 * b0)
    ps.mu1 = mu1
    ps.b1 = b1
    ps.lc1 = -log(2.0 * b1)
    ps.evals = 0
    ps.failed = 0
    cuts = [a] + [k for k in sorted(kinks) if a < k < b] + [b]
    cdef double total = 0.0, errsum = 0.0, v = 0.0, e = 0.0
    cdef double lo, hi, flo, fhi, fmid, span = b - a
    for i in range(len(cuts) - 1):
        lo = cuts[i]
        hi = cuts[i + 1]
        if not hi > lo:
            continue
        with nogil:
            flo = _pair_f(&ps, lo)
            fhi = _pair_f(&ps, hi)
            fmid = _pair_f(&ps, 0.5 * (lo + hi))
            _refine(&ps, lo, hi, flo, fmid, fhi, tol * (hi - lo) / span, 0, max_depth, &v, &e)
        total += v
        errsum += e
    return total, errsum, ps.evals, not ps.failed
