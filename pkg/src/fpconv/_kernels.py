"""Hot numerical kernels.

Every kernel exists twice: a numba ``@njit`` version and a vectorised numpy
version.  The numba versions are used when numba imports and the environment
variable ``FPCONV_DISABLE_JIT`` is unset (or ``0``); otherwise the numpy
versions are bound.  Both implementations are always importable under
``nb_*`` / ``np_*`` names so that tests and benchmarks can compare them.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def deco(fn):
            return fn

        return deco


def _jit_disabled() -> bool:
    return os.environ.get("FPCONV_DISABLE_JIT", "0").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _jit_disabled()

_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# numpy implementations


def np_resolvent_sum(x, w, z, power):
    """sum_i w_i (x_i - z)^(-power)."""
    return float(np.dot(w, (x - z) ** (-power)))


def np_resolvent_var(x, w, z):
    """Weighted variance of 1/(x - z), two-pass (no cancellation)."""
    r = 1.0 / (x - z)
    m = np.dot(w, r)
    d = r - m
    return float(np.dot(w, d * d))


def np_log_sum(x, w, anchor, scale):
    """sum_i w_i log1p((x_i - anchor) / scale)."""
    return float(np.dot(w, np.log1p((x - anchor) / scale)))


def np_householder_tridiag(a):
    """Reduce a symmetric matrix to tridiagonal form; returns (diag, offdiag)."""
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    e = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        x = a[k + 1:, k]
        nrm = math.sqrt(float(np.dot(x, x)))
        if nrm == 0.0:
            e[k] = 0.0
            continue
        alpha = -nrm if x[0] >= 0.0 else nrm
        v = x.copy()
        v[0] -= alpha
        vv = float(np.dot(v, v))
        sub = a[k + 1:, k + 1:]
        tau = 2.0 / vv
        p = tau * (sub @ v)
        kk = 0.5 * tau * float(np.dot(v, p))
        wv = p - kk * v
        sub -= np.outer(v, wv) + np.outer(wv, v)
        e[k] = alpha
    if n >= 2:
        e[n - 2] = a[n - 1, n - 2]
    return np.diag(a).copy(), e


def np_tridiag_eigvals(d, e):
    return np.sort(eigvalsh_tridiagonal(np.asarray(d, float), np.asarray(e, float)))


def np_sym_eigvals(a):
    d, e = np_householder_tridiag(a)
    return np_tridiag_eigvals(d, e)


# ---------------------------------------------------------------------------
# numba implementations


@njit(cache=True, nogil=True)
def nb_resolvent_sum(x, w, z, power):
    s = 0.0
    for i in range(x.shape[0]):
        s += w[i] * (x[i] - z) ** (-power)
    return s


@njit(cache=True, nogil=True)
def nb_resolvent_var(x, w, z):
    m = 0.0
    for i in range(x.shape[0]):
        m += w[i] / (x[i] - z)
    s = 0.0
    for i in range(x.shape[0]):
        d = 1.0 / (x[i] - z) - m
        s += w[i] * d * d
    return s


@njit(cache=True, nogil=True)
def nb_log_sum(x, w, anchor, scale):
    s = 0.0
    for i in range(x.shape[0]):
        s += w[i] * math.log1p((x[i] - anchor) / scale)
    return s


@njit(cache=True, nogil=True)
def nb_householder_tridiag(a_in):
    a = a_in.copy()
    n = a.shape[0]
    e = np.zeros(max(n - 1, 0))
    v = np.empty(n)
    p = np.empty(n)
    for k in range(n - 2):
        m = n - k - 1
        nrm = 0.0
        for i in range(m):
            nrm += a[k + 1 + i, k] ** 2
        nrm = math.sqrt(nrm)
        if nrm == 0.0:
            e[k] = 0.0
            continue
        x0 = a[k + 1, k]
        alpha = -nrm if x0 >= 0.0 else nrm
        for i in range(m):
            v[i] = a[k + 1 + i, k]
        v[0] -= alpha
        vv = 0.0
        for i in range(m):
            vv += v[i] * v[i]
        tau = 2.0 / vv
        # p = tau * A22 v, using symmetry (lower triangle is kept current)
        for i in range(m):
            p[i] = 0.0
        for j in range(m):
            vj = v[j]
            col = k + 1 + j
            s = a[col, col] * vj
            pj = 0.0
            for i in range(j + 1, m):
                aij = a[k + 1 + i, col]
                p[i] += aij * vj
                pj += aij * v[i]
            p[j] += s + pj
        kk = 0.0
        for i in range(m):
            p[i] *= tau
            kk += v[i] * p[i]
        kk *= 0.5 * tau
        for i in range(m):
            p[i] -= kk * v[i]
        # rank-2 update of the lower triangle
        for j in range(m):
            col = k + 1 + j
            vj = v[j]
            wj = p[j]
            for i in range(j, m):
                a[k + 1 + i, col] -= v[i] * wj + p[i] * vj
        e[k] = alpha
    if n >= 2:
        e[n - 2] = a[n - 1, n - 2]
    d = np.empty(n)
    for i in range(n):
        d[i] = a[i, i]
    return d, e


@njit(cache=True, nogil=True)
def nb_tridiag_eigvals(d_in, e_in):
    """Implicit-shift QL on a symmetric tridiagonal matrix (eigenvalues only)."""
    n = d_in.shape[0]
    d = d_in.copy()
    e = np.zeros(n)
    for i in range(n - 1):
        e[i] = e_in[i]
    eps = 2.220446049250313e-16
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > 200:
                raise RuntimeError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(d)


@njit(cache=True, nogil=True)
def nb_sym_eigvals(a):
    d, e = nb_householder_tridiag(a)
    return nb_tridiag_eigvals(d, e)


# ---------------------------------------------------------------------------
# dispatch

if USE_NUMBA:
    resolvent_sum = nb_resolvent_sum
    resolvent_var = nb_resolvent_var
    log_sum = nb_log_sum
    sym_eigvals = nb_sym_eigvals
else:
    resolvent_sum = np_resolvent_sum
    resolvent_var = np_resolvent_var
    log_sum = np_log_sum
    sym_eigvals = np_sym_eigvals


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def warmup() -> None:
    """Trigger compilation of the numba kernels (no-op on the numpy path)."""
    x = np.array([0.0, 1.0])
    w = np.array([0.5, 0.5])
    resolvent_sum(x, w, -1.0, 1)
    resolvent_sum(x, w, -1.0, 2)
    resolvent_var(x, w, -1.0)
    log_sum(x, w, 0.0, 1.0)
    sym_eigvals(np.eye(4) + 0.1)
