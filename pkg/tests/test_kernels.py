from __future__ import annotations

import numpy as np
import pytest

from fpconv import _kernels


def _random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


@pytest.mark.parametrize("n", [1, 2, 5, 40, 150])
def test_eigensolvers_agree_with_lapack(n):
    a = _random_symmetric(n, n)
    ref = np.linalg.eigvalsh(a)
    scale = max(1.0, np.abs(ref).max())
    assert np.allclose(np.sort(_kernels.np_sym_eigvals(a)), ref, atol=1e-12 * scale)
    if _kernels.HAVE_NUMBA:
        assert np.allclose(np.sort(_kernels.nb_sym_eigvals(a)), ref, atol=1e-12 * scale)


def test_eigensolver_degenerate_spectrum():
    a = np.diag([1.0, 1.0, 1.0, -2.0, 5.0])
    assert np.allclose(np.sort(_kernels.sym_eigvals(a)), [-2, 1, 1, 1, 5])


def test_resolvent_kernels_agree():
    rng = np.random.default_rng(0)
    x = np.sort(rng.uniform(-1, 1, 500))
    w = rng.uniform(0, 1, 500)
    w /= w.sum()
    z = -1.3
    for p in (1, 2, 3, 5):
        ref = np.dot(w, (x - z) ** -float(p))
        assert _kernels.np_resolvent_sum(x, w, z, p) == pytest.approx(ref, rel=1e-13)
        if _kernels.HAVE_NUMBA:
            assert _kernels.nb_resolvent_sum(x, w, z, p) == pytest.approx(ref, rel=1e-13)
    g = np.dot(w, 1 / (x - z))
    var = np.dot(w, (1 / (x - z) - g) ** 2)
    assert _kernels.np_resolvent_var(x, w, z) == pytest.approx(var, rel=1e-12)
    ls = np.dot(w, np.log1p((x + 1) / 0.3))
    assert _kernels.np_log_sum(x, w, -1.0, 0.3) == pytest.approx(ls, rel=1e-13)
    if _kernels.HAVE_NUMBA:
        assert _kernels.nb_resolvent_var(x, w, z) == pytest.approx(var, rel=1e-12)
        assert _kernels.nb_log_sum(x, w, -1.0, 0.3) == pytest.approx(ls, rel=1e-13)


def test_backend_name():
    assert _kernels.backend() in ("numba", "numpy")
