"""Property-based checks over random measures and points."""

from __future__ import annotations

import math

from hypothesis import given, settings
from hypothesis import strategies as st

from fpconv.freeconv import conv_stieltjes, endpoint_summary, fixed_point_residual
from fpconv.measures import Atomic, MarchenkoPastur, Semicircle
from fpconv.potential import u_variational
from fpconv.stieltjes import g_inverse, g_value

betas = st.floats(0.2, 3.0)
offsets = st.floats(1e-3, 20.0)


@st.composite
def atomic(draw):
    k = draw(st.integers(1, 4))
    locs = sorted(draw(st.lists(st.floats(-3, 3), min_size=k, max_size=k, unique=True)))
    locs = [x for i, x in enumerate(locs) if i == 0 or x - locs[i - 1] > 1e-3]
    w = draw(st.lists(st.floats(0.1, 1.0), min_size=len(locs), max_size=len(locs)))
    s = sum(w)
    return Atomic(tuple((x, wi / s) for x, wi in zip(locs, w)))


@settings(max_examples=40, deadline=None)
@given(beta=betas, d=offsets)
def test_g_inverse_round_trip(beta, d):
    for m in (Semicircle(beta), MarchenkoPastur(beta)):
        z = m.support().lower - d
        assert math.isclose(g_inverse(m, g_value(m, z)), z, rel_tol=1e-10, abs_tol=1e-10)


@settings(max_examples=40, deadline=None)
@given(beta=betas, nu=atomic(), d=offsets)
def test_fixed_point_and_monotone_potential(beta, nu, d):
    mu = Semicircle(beta)
    zs = endpoint_summary(mu, nu).z_star
    assert zs < nu.support().lower
    z = zs - d
    g, _ = conv_stieltjes(mu, nu, z)
    assert 0 < g and fixed_point_residual(mu, nu, z, g) < 1e-9
    # U is decreasing in z on (-inf, z*) since U' = -G < 0
    assert u_variational(mu, nu, z - 0.5, verify=False).u > u_variational(mu, nu, z, verify=False).u


@settings(max_examples=30, deadline=None)
@given(b1=betas, b2=betas)
def test_semicircle_edges_add_in_quadrature(b1, b2):
    s = endpoint_summary(Semicircle(b1), Semicircle(b2))
    assert math.isclose(s.z_star, -2 * math.hypot(b1, b2), rel_tol=1e-12)
    assert math.isclose(s.g_star, 1 / math.hypot(b1, b2), rel_tol=1e-9)


@settings(max_examples=30, deadline=None)
@given(beta=betas, a=st.floats(-5, 5))
def test_mp_shift(beta, a):
    mu = MarchenkoPastur(beta)
    from fpconv.measures import delta

    assert abs(endpoint_summary(mu, delta(a)).z_star - (a + mu.support().lower)) <= 1e-9 * max(1, abs(a))
