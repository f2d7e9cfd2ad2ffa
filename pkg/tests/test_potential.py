from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from fpconv.errors import BeyondEdge, InsideOrRightOfSupport, OutOfDomain, OutOfE_Domain
from fpconv.freeconv import conv_stieltjes, endpoint_summary
from fpconv.measures import JacobiDensity, MarchenkoPastur, Semicircle, delta, two_atom
from fpconv.potential import Method, e_deriv, e_value, emit_profile, u_bounded, u_direct, u_variational

SC, PM = Semicircle(1.0), two_atom(-1.0, 1.0)
G_EX = (3 - math.sqrt(5)) / 2


def test_u_direct_examples():
    assert u_direct(delta(0.0), -3.0) == pytest.approx(math.log(3.0))
    assert u_direct(SC, -1e6) - math.log(1e6) == pytest.approx(0.0, abs=1e-6)
    assert u_direct(SC, -3.0) == pytest.approx(G_EX**2 / 2 + math.log(3 - G_EX), abs=1e-13)
    with pytest.raises(InsideOrRightOfSupport):
        u_direct(SC, -2.0)


def test_e_examples():
    assert e_value(SC, delta(0.0), -3.0, G_EX) == pytest.approx(1.0353727, abs=1e-7)
    nu = JacobiDensity(-1.0, 1.0, 0.5, 0.5)
    assert e_value(SC, nu, -2.0, 0.0) == pytest.approx(u_direct(nu, -2.0), abs=1e-15)
    assert e_value(MarchenkoPastur(1.0), delta(0.0), -1.0, 1.0) == pytest.approx(
        math.log(2) - 0.5 + math.log(1.5), abs=1e-14)
    assert e_deriv(SC, delta(0.0), -3.0, 0.1) == pytest.approx(0.1 - 1 / 2.9, abs=1e-15)
    with pytest.raises(OutOfE_Domain):
        e_value(SC, PM, -3.0, 2.5)


def test_e_deriv_vanishes_at_conv_stieltjes():
    for mu, nu in ((SC, PM), (MarchenkoPastur(0.5), JacobiDensity(-1.0, 1.0, 0.5, 0.5))):
        z = endpoint_summary(mu, nu).z_star - 0.4
        g, _ = conv_stieltjes(mu, nu, z)
        assert abs(e_deriv(mu, nu, z, g)) < 1e-9


def test_u_variational_examples():
    r = u_variational(SC, delta(0.0), -3.0)
    assert r.u == pytest.approx(1.0353727, abs=1e-7)
    assert r.minimizer_g == pytest.approx(G_EX, abs=1e-14)
    assert r.method == Method.VariationalAtRoot
    assert abs(r.u - r.e_at_min) <= 1e-9
    r = u_variational(SC, SC, -3.0)
    assert r.u == pytest.approx(u_direct(Semicircle(math.sqrt(2)), -3.0), abs=1e-8)
    assert u_variational(SC, PM, -1e5).u - math.log(1e5) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(BeyondEdge):
        u_variational(SC, PM, endpoint_summary(SC, PM).z_star)


def test_bounded_minimisation_alone():
    for mu, nu in ((SC, PM), (MarchenkoPastur(1.0), delta(0.0)), (MarchenkoPastur(0.5), delta(1.0))):
        z = endpoint_summary(mu, nu).z_star - 0.25
        a, b = u_variational(mu, nu, z), u_bounded(mu, nu, z)
        assert b.u == pytest.approx(a.u, abs=1e-10)
        assert b.method == Method.BoundedMinimization


def test_u_matches_direct_for_convolution_with_point_mass():
    # sc(b) [+] delta_a is a shifted semicircle
    r = u_variational(Semicircle(0.7), delta(2.0), 0.0)
    assert r.u == pytest.approx(u_direct(Semicircle(0.7), -2.0), abs=1e-12)


def test_f_profile(tmp_path):
    t = emit_profile(SC, delta(0.0), None, "f", (-4.0, -0.1, 40))
    assert np.allclose(t.values, t.abscissa + 1 / t.abscissa, atol=1e-13)
    (x, y, k), = [a for a in t.annotations if a[2] == "LocalMax"]
    assert (x, y) == pytest.approx((-1.0, -2.0), abs=1e-9)
    main, ann = t.write_csv(str(tmp_path))
    rows = list(csv.reader(open(main)))
    assert rows[0] == ["abscissa", "value"] and len(rows) == 41
    assert list(csv.reader(open(ann)))[0] == ["abscissa", "value", "kind"]
    assert main.endswith(f"f_{t.config_hash}.csv")


def test_ginv_profile():
    t = emit_profile(SC, delta(0.0), None, "ginv", (0.05, 3.0, 60))
    assert np.allclose(t.values, -t.abscissa - 1 / t.abscissa, atol=1e-9)
    assert any(k == "g_star" and x == pytest.approx(1.0) for x, _, k in t.annotations)


def test_e_profile_values_and_clipping():
    t = emit_profile(SC, PM, -3.0, "e")
    for g, v in list(zip(t.abscissa, t.values))[::37]:
        assert v == e_value(SC, PM, -3.0, g)
    assert t.abscissa.max() < 2.0
    with pytest.raises(OutOfDomain):
        emit_profile(SC, PM, -3.0, "e", (2.5, 4.0, 10))


def test_j_profile_is_sum_of_r():
    t = emit_profile(SC, SC, None, "j", (0.1, 2.0, 20))
    assert np.allclose(t.values, -2 * t.abscissa - 1 / t.abscissa)


def test_profile_hash_is_deterministic(tmp_path):
    a = emit_profile(SC, PM, -3.0, "e", (0.1, 1.9, 30))
    b = emit_profile(SC, PM, -3.0, "e", (0.1, 1.9, 30))
    pa, _ = a.write_csv(str(tmp_path / "a"))
    pb, _ = b.write_csv(str(tmp_path / "b"))
    assert open(pa).read() == open(pb).read()
    assert a.config_hash == b.config_hash
