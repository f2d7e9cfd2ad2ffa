from __future__ import annotations

import math

import numpy as np
import pytest

from fpconv.errors import InsideSupport, OutOfDomain, OutOfRange
from fpconv.measures import JacobiDensity, MarchenkoPastur, Semicircle, delta, integrate, two_atom
from fpconv.stieltjes import edge_data, g_deriv, g_inverse, g_inverse_any, g_inverse_extended, g_value

NUMERIC = [JacobiDensity(-1.0, 1.0, 0.5, 0.5), JacobiDensity(0.0, 2.0, 1.5, 0.5), JacobiDensity(-2.0, 1.0, 2.0, 0.0)]


def test_examples():
    assert g_value(Semicircle(1.0), -2.5) == pytest.approx(0.5, abs=1e-15)
    for z in (-3.0, -0.5, 2.0):
        assert g_value(delta(0.0), z) == pytest.approx(-1.0 / z)
    assert g_value(Semicircle(1.0), -1e6) == pytest.approx(1e-6, rel=1e-6)
    assert g_deriv(delta(0.0), -1.0, 1) == 1.0
    assert g_inverse(Semicircle(1.0), 0.5) == pytest.approx(-2.5)
    assert g_inverse(delta(0.0), 0.25) == pytest.approx(-4.0)
    assert g_inverse_extended(Semicircle(1.0), 2.0) == pytest.approx(-2.5)
    assert g_inverse_extended(Semicircle(1.0), 0.5) == pytest.approx(-2.5)
    assert g_inverse_extended(MarchenkoPastur(1.0), 1.0) == pytest.approx(-0.5)


@pytest.mark.parametrize("m", [Semicircle(1.0), MarchenkoPastur(0.5), MarchenkoPastur(3.0)], ids=repr)
@pytest.mark.parametrize("z", [-0.01, -1.0, -7.0, 30.0])
def test_closed_forms_against_quadrature(m, z):
    s = m.support()
    z = s.lower + z if z < 0 else s.upper + z
    q = integrate(m, lambda x: 1.0 / (x - z), near=z)
    assert g_value(m, z) == pytest.approx(q, rel=1e-12)


def test_closed_form_deriv_matches_difference():
    m = Semicircle(1.0)
    h = 1e-5
    fd = (g_value(m, -3 + h) - g_value(m, -3 - h)) / (2 * h)
    assert g_deriv(m, -3.0, 1) == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize("m", [Semicircle(1.0), MarchenkoPastur(0.5), *NUMERIC, two_atom(-1, 1)], ids=repr)
def test_derivatives_positive_left_of_support(m):
    for d in (1e-6, 1e-2, 1.0, 50.0):
        z = m.support().lower - d
        for k in (1, 2, 3, 4):
            assert g_deriv(m, z, k) > 0


def test_inside_support_errors():
    with pytest.raises(InsideSupport):
        g_value(Semicircle(1.0), 0.0)
    with pytest.raises(InsideSupport):
        g_value(Semicircle(1.0), -2.0)
    with pytest.raises(InsideSupport):
        g_deriv(two_atom(-1, 1), 0.5, 1)
    with pytest.raises(ValueError):
        g_deriv(Semicircle(1.0), -3.0, 5)


def test_edge_data():
    assert edge_data(Semicircle(1.0)).g_star == 1.0
    assert edge_data(Semicircle(2.0)).g_star == 0.5
    assert edge_data(two_atom(-1, 1)).g_star == math.inf
    assert edge_data(MarchenkoPastur(1.0)).g_star == math.inf
    assert edge_data(MarchenkoPastur(4.0)).g_star == pytest.approx(1.0)
    # Jacobi edge values are limits of G at the edges
    for m in NUMERIC:
        ed = edge_data(m)
        if math.isfinite(ed.g_star):
            assert g_value(m, m.support().lower - 1e-12) == pytest.approx(ed.g_star, rel=1e-4)
        if math.isfinite(ed.g_plus):
            assert g_value(m, m.support().upper + 1e-12) == pytest.approx(ed.g_plus, rel=1e-4)


@pytest.mark.parametrize("m", [Semicircle(0.7), MarchenkoPastur(0.5), MarchenkoPastur(2.0), *NUMERIC,
                               two_atom(-0.3, 2.0, 0.25)], ids=repr)
def test_inverse_round_trip(m):
    rng = np.random.default_rng(3)
    lo = m.support().lower
    for d in np.exp(rng.uniform(math.log(1e-8), math.log(1e3), 100)):
        z = lo - d
        assert g_inverse(m, g_value(m, z)) == pytest.approx(z, rel=1e-12, abs=1e-12 * max(1.0, d))


def test_inverse_right_branch():
    m = JacobiDensity(-1.0, 1.0, 0.5, 0.5)
    for z in (1.001, 2.0, 10.0):
        assert g_inverse_any(m, g_value(m, z)) == pytest.approx(z, rel=1e-12)


def test_inverse_range_errors():
    with pytest.raises(OutOfRange):
        g_inverse(Semicircle(1.0), 1.5)
    with pytest.raises(OutOfRange):
        g_inverse(Semicircle(1.0), -0.1)
    with pytest.raises(OutOfDomain):
        g_inverse_extended(Semicircle(1.0), 0.0)
