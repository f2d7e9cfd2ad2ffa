from __future__ import annotations

import math

import numpy as np
import pytest

from fpconv.errors import MeasureSpecError, NonIntegrable
from fpconv.measures import (
    Atomic,
    JacobiDensity,
    MarchenkoPastur,
    Semicircle,
    cdf,
    delta,
    integrate,
    measure_from_json,
    moment,
    quantiles,
    support,
    two_atom,
)

FAMILIES = [
    Semicircle(1.0),
    Semicircle(0.3),
    MarchenkoPastur(0.5),
    MarchenkoPastur(1.0),
    MarchenkoPastur(2.5),
    JacobiDensity(-1.0, 1.0, 0.5, 0.5),
    JacobiDensity(0.0, 3.0, -0.5, 1.5),
    two_atom(-1.0, 1.0),
]


def test_support_examples():
    assert support(Semicircle(1.0)) == (-2.0, 2.0) or support(Semicircle(1.0)).lower == -2.0
    s = support(MarchenkoPastur(0.5))
    assert s.lower == 0.0 and s.upper == pytest.approx((1 + math.sqrt(0.5)) ** 2)
    s = support(two_atom(-1.0, 1.0))
    assert (s.lower, s.upper) == (-1.0, 1.0)


@pytest.mark.parametrize("m", FAMILIES, ids=repr)
def test_total_mass(m):
    assert integrate(m, lambda x: np.ones_like(x)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m", FAMILIES, ids=repr)
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_closed_form_moments_match_quadrature(m, k):
    assert integrate(m, lambda x: x**k) == pytest.approx(moment(m, k), rel=1e-11, abs=1e-12)


def test_moment_examples():
    assert moment(Semicircle(1.0), 2) == 1.0
    assert moment(Semicircle(2.0), 4) == pytest.approx(2 * 16)
    for beta in (0.25, 1.0, 3.0):
        assert moment(MarchenkoPastur(beta), 1) == pytest.approx(beta)
        assert moment(MarchenkoPastur(beta), 2) == pytest.approx(beta + beta**2)
    for m in FAMILIES:
        assert moment(m, 0) == 1.0
    assert integrate(two_atom(-1.0, 1.0), lambda x: x**3) == 0.0


def test_integrate_rejects_nonintegrable():
    with pytest.raises(NonIntegrable):
        integrate(two_atom(-1.0, 1.0), lambda x: 1.0 / (x + 1.0))
    with pytest.raises(NonIntegrable):
        integrate(MarchenkoPastur(0.5), lambda x: np.log(x))


def test_near_singular_log_integrand_is_accurate():
    # int log(x - z) dsc(1) has a closed form via G
    z = -2.0 - 1e-9
    g = 2.0 / (-z + math.sqrt(z * z - 4.0))
    exact = 0.5 * g * g - math.log(g)
    val = integrate(Semicircle(1.0), lambda x: np.log(x - z), near=z)
    assert val == pytest.approx(exact, abs=1e-13)


@pytest.mark.parametrize("m", FAMILIES, ids=repr)
def test_json_round_trip(m):
    assert measure_from_json(m.to_json()) == m


def test_json_parsing_errors():
    with pytest.raises(MeasureSpecError):
        measure_from_json('{"type": "atomic", "atoms": [[0, 0.4]]}')
    with pytest.raises(MeasureSpecError):
        measure_from_json('{"type": "atomic", "atoms": [[0, 0.5], [0, 0.5]]}')
    with pytest.raises(MeasureSpecError):
        measure_from_json('{"type": "unknown"}')
    with pytest.raises(MeasureSpecError):
        measure_from_json("{not json")
    with pytest.raises(MeasureSpecError):
        measure_from_json('{"type": "jacobi", "a": 0, "b": 1, "p": 1, "q": 1, "c": 5}')
    with pytest.raises(MeasureSpecError):
        Semicircle(-1.0)
    with pytest.raises(MeasureSpecError):
        JacobiDensity(1.0, 0.0, 0.5, 0.5)


def test_atomic_sorted_on_parse():
    m = measure_from_json({"type": "atomic", "atoms": [[1, 0.5], [-1, 0.5]]})
    assert m == two_atom(-1.0, 1.0)


def test_single_atom_is_degenerate():
    assert delta(0.0).is_degenerate
    assert not Semicircle(1.0).is_degenerate


@pytest.mark.parametrize("m", [Semicircle(1.0), MarchenkoPastur(0.5), MarchenkoPastur(2.0),
                               JacobiDensity(-1.0, 2.0, 1.0, 0.5)], ids=repr)
def test_quantiles_invert_cdf(m):
    q = quantiles(m, 64)
    assert np.all(np.diff(q) >= 0)
    u = (np.arange(64) + 0.5) / 64
    for qi, ui in zip(q, u):
        if qi > m.support().lower:
            assert cdf(m, qi) == pytest.approx(ui, abs=1e-9)


def test_atomic_quantiles():
    q = quantiles(Atomic(((-1.0, 0.25), (2.0, 0.75))), 8)
    assert list(q) == [-1.0, -1.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0]
