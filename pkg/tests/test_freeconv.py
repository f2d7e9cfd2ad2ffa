from __future__ import annotations

import math

import pytest

from fpconv.errors import BeyondEdge, DegenerateMu, OutOfDomain
from fpconv.freeconv import (
    CriticalKind,
    CriticalSource,
    HStarKind,
    classify_critical_points,
    conv_stieltjes,
    endpoint_summary,
    f_deriv,
    f_value,
    fixed_point_residual,
    h_greater,
)
from fpconv.measures import JacobiDensity, MarchenkoPastur, Semicircle, delta, two_atom
from fpconv.rtransform import RTransformReal
from fpconv.stieltjes import g_value

SC, PM = Semicircle(1.0), two_atom(-1.0, 1.0)


def test_f_examples():
    assert f_value(SC, delta(0.0), -1.0) == pytest.approx(-2.0)
    assert f_value(MarchenkoPastur(1.0), delta(0.0), -1.0) == pytest.approx(-0.5)
    assert f_value(SC, PM, -1e6) == pytest.approx(-1e6, rel=1e-3)
    assert f_deriv(SC, delta(0.0), -1.0) == pytest.approx(0.0, abs=1e-15)
    assert f_deriv(SC, PM, -1e6) == pytest.approx(1.0, abs=1e-9)


def test_f_domain_errors():
    with pytest.raises(OutOfDomain):
        f_value(SC, PM, -0.5)
    # MP: R defined only for t < 1, i.e. G_nu(h) > -1 always holds; sc+Jacobi stays inside too
    with pytest.raises(OutOfDomain):
        f_value(JacobiDensity(-1.0, 1.0, 0.5, 0.5), delta(0.0), -0.4)


@pytest.mark.parametrize("h", [-5.0, -2.0, -1.3, -1.1])
def test_f_deriv_matches_difference(h):
    for mu in (SC, MarchenkoPastur(0.5), JacobiDensity(-1.0, 1.0, 0.5, 0.5)):
        d = 1e-6
        try:
            fd = (f_value(mu, PM, h + d) - f_value(mu, PM, h - d)) / (2 * d)
        except OutOfDomain:
            continue
        assert f_deriv(mu, PM, h) == pytest.approx(fd, abs=1e-6)


def test_endpoint_examples():
    s = endpoint_summary(SC, delta(0.0))
    assert (s.h_star, s.g_star, s.z_star) == pytest.approx((-1.0, 1.0, -2.0), abs=1e-12)
    assert s.h_star_kind == HStarKind.CriticalPoint
    s = endpoint_summary(SC, SC)
    assert s.h_star == pytest.approx(-math.sqrt(4.5), abs=1e-10)
    assert s.g_star == pytest.approx(1 / math.sqrt(2), abs=1e-10)
    assert s.z_star == pytest.approx(-2 * math.sqrt(2), abs=1e-12)
    s = endpoint_summary(MarchenkoPastur(1.0), delta(0.0))
    assert s.h_star == 0.0 and s.g_star == math.inf and s.z_star == pytest.approx(0.0, abs=1e-12)
    assert s.h_star_kind == HStarKind.DomainEndpoint


def test_endpoint_mp_shift_and_degenerate():
    for beta in (0.5, 2.0):
        s = endpoint_summary(MarchenkoPastur(beta), delta(3.0))
        assert s.z_star == pytest.approx(3.0 + MarchenkoPastur(beta).support().lower, abs=1e-9)
    with pytest.raises(DegenerateMu):
        endpoint_summary(delta(1.0), SC)


def test_endpoint_symmetric_in_the_pair():
    a, b = JacobiDensity(-1.0, 1.0, 0.5, 0.5), Semicircle(0.5)
    assert endpoint_summary(a, b).z_star == pytest.approx(endpoint_summary(b, a).z_star, abs=1e-9)


def test_polynomial_r_edges():
    rt = RTransformReal.from_polynomial([0.0, 1.0, 1 / 4.5, 1 / 80])
    assert endpoint_summary(rt, two_atom(-1.17, -0.17)).z_star == pytest.approx(-2.63725, abs=1e-5)


def test_conv_stieltjes_examples():
    g, h = conv_stieltjes(SC, delta(0.0), -2.5)
    assert g == pytest.approx(0.5, abs=1e-14) and h == pytest.approx(-2.0, abs=1e-13)
    g, _ = conv_stieltjes(SC, SC, -3.0)
    assert g == pytest.approx(g_value(Semicircle(math.sqrt(2)), -3.0), abs=1e-14)
    with pytest.raises(BeyondEdge):
        conv_stieltjes(SC, delta(0.0), -2.0)


def test_h_greater():
    assert h_greater(SC, delta(0.0), -2.5) == pytest.approx(-0.5, abs=1e-12)
    h = h_greater(SC, PM, -3.0)
    assert f_value(SC, PM, h) == pytest.approx(-3.0, abs=1e-10)
    assert h > endpoint_summary(SC, PM).h_star
    assert h_greater(MarchenkoPastur(1.0), delta(0.0), -1.0) is None
    with pytest.raises(BeyondEdge):
        h_greater(SC, PM, 0.0)


def test_residual_small():
    for mu, nu in ((SC, PM), (MarchenkoPastur(0.5), JacobiDensity(-1.0, 1.0, 0.5, 0.5))):
        z = endpoint_summary(mu, nu).z_star - 0.7
        g, _ = conv_stieltjes(mu, nu, z)
        assert fixed_point_residual(mu, nu, z, g) < 1e-12


def test_classification_examples():
    zs = endpoint_summary(SC, PM).z_star
    rep = classify_critical_points(SC, PM, zs - 1.0)
    assert rep.kinds()[0] == CriticalKind.LocalMin
    assert rep.points[0].g < endpoint_summary(SC, PM).g_star
    assert rep.kinds()[1:] in ([], [CriticalKind.LocalMax])
    assert len(classify_critical_points(SC, PM, zs + 0.1)) == 0
    mp = MarchenkoPastur(2.0)
    s = endpoint_summary(mp, PM)
    rep = classify_critical_points(mp, PM, s.z_star)
    assert rep.kinds() == [CriticalKind.Inflection]
    assert rep.points[0].g == pytest.approx(s.g_star, rel=1e-6)


def test_rprime_zero_critical_point():
    rt = RTransformReal.from_polynomial([0.0, 1.0, 1.0 / 6.0])
    rep = classify_critical_points(rt, two_atom(-1.17, -0.17), -2.77)
    assert [p.source for p in rep].count(CriticalSource.RPrimeZero) == 1
    assert rep.kinds() == [CriticalKind.LocalMin, CriticalKind.LocalMax, CriticalKind.LocalMin, CriticalKind.LocalMax]
    with pytest.raises(DegenerateMu):
        classify_critical_points(delta(0.0), SC, -3.0)
