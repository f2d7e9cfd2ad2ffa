"""Stieltjes transform ``G(z) = int dmu(x) / (x - z)`` on the real axis.

Sign convention: ``G`` is positive and increasing on (-inf, supp_-), negative
on (supp_+, inf).  Closed forms are used for the semicircle and
Marchenko-Pastur laws and for a single atom; everything else goes through the
graded quadrature of :mod:`fpconv.measures`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy import special

from . import _kernels
from .errors import InsideSupport, OutOfDomain, OutOfRange
from .measures import Atomic, JacobiDensity, MarchenkoPastur, Measure, Semicircle, rule_near

INF = math.inf
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class StieltjesEdgeData:
    g_star: float
    g_star_prime: float
    g_plus: float


def _check_outside(m: Measure, z: float) -> None:
    s = m.support()
    if not (z < s.lower or z > s.upper) or math.isnan(z):
        raise InsideSupport(f"z={z!r} lies in the support [{s.lower}, {s.upper}]")


def _single_atom(m: Measure) -> float | None:
    if isinstance(m, Atomic) and len(m.atoms) == 1:
        return m.atoms[0][0]
    return None


def _g_sc(beta: float, z: float) -> float:
    r = math.sqrt((z - 2 * beta) * (z + 2 * beta))
    if z < 0:
        return 2.0 / (-z + r)
    return -2.0 / (z + r)


def _g_mp(beta: float, z: float, left: bool) -> float:
    # root of z g^2 + (z - beta + 1) g + 1 = 0, written without cancellation
    B = z - beta + 1.0
    lo, hi = MarchenkoPastur(beta).edges
    s = math.sqrt((z - lo) * (z - hi))
    if left:
        if B > 0.0:  # only for z < 0; avoids s - B cancellation near a hard edge
            return -(B + s) / (2.0 * z)
        return 2.0 / (s - B)
    return 2.0 / (-B - s)


def g_value(m: Measure, z: float) -> float:
    """G_m(z) for real z outside the closed support."""
    _check_outside(m, z)
    a = _single_atom(m)
    if a is not None:
        return 1.0 / (a - z)
    if isinstance(m, Semicircle):
        return _g_sc(m.beta, z)
    if isinstance(m, MarchenkoPastur):
        return _g_mp(m.beta, z, z < m.support().lower)
    x, w = rule_near(m, z)
    return _kernels.resolvent_sum(x, w, float(z), 1)


def g_deriv(m: Measure, z: float, k: int = 1) -> float:
    """k-th derivative ``k! int (x-z)^-(k+1) dm`` for 1 <= k <= 4."""
    if not 1 <= k <= 4:
        raise ValueError("derivative order must be in 1..4")
    _check_outside(m, z)
    a = _single_atom(m)
    if a is not None:
        return math.factorial(k) / (a - z) ** (k + 1)
    if k == 1 and isinstance(m, (Semicircle, MarchenkoPastur)):
        g = g_value(m, z)
        if isinstance(m, Semicircle):
            return g * g / (1.0 - (m.beta * g) ** 2)
        # z = beta/(1+g) - 1/g  =>  dz/dg = 1/g^2 - beta/(1+g)^2
        return 1.0 / (1.0 / (g * g) - m.beta / (1.0 + g) ** 2)
    x, w = rule_near(m, z)
    return math.factorial(k) * _kernels.resolvent_sum(x, w, float(z), k + 1)


def resolvent_variance(m: Measure, z: float) -> float:
    """Variance of 1/(x - z) under m; equals G'(z) - G(z)^2 without cancellation."""
    _check_outside(m, z)
    x, w = rule_near(m, z)
    return _kernels.resolvent_var(x, w, float(z))


@lru_cache(maxsize=None)
def edge_data(m: Measure) -> StieltjesEdgeData:
    """Limits of G and G' at supp_- and of G at supp_+ (inf allowed)."""
    if isinstance(m, Atomic):
        return StieltjesEdgeData(INF, INF, -INF)
    if isinstance(m, Semicircle):
        return StieltjesEdgeData(1.0 / m.beta, INF, -1.0 / m.beta)
    if isinstance(m, MarchenkoPastur):
        sb = math.sqrt(m.beta)
        g_plus = -1.0 / (1.0 + sb)
        if m.beta <= 1.0:
            return StieltjesEdgeData(INF, INF, g_plus)
        return StieltjesEdgeData(1.0 / (sb - 1.0), INF, g_plus)
    if isinstance(m, JacobiDensity):
        L = m.b - m.a
        c = m.c
        p, q = m.p, m.q
        # int c (x-a)^(p-1) (b-x)^q dx = c L^(p+q) B(p, q+1)
        g_star = c * L ** (p + q) * math.exp(special.betaln(p, q + 1)) if p > 0 else INF
        g_star_prime = c * L ** (p + q - 1) * math.exp(special.betaln(p - 1, q + 1)) if p > 1 else INF
        g_plus = -c * L ** (p + q) * math.exp(special.betaln(p + 1, q)) if q > 0 else -INF
        return StieltjesEdgeData(g_star, g_star_prime, g_plus)
    raise TypeError(f"unsupported measure {m!r}")  # pragma: no cover


def _invert_numeric(m: Measure, g: float) -> float:
    """Solve G(z) = g by safeguarded Newton in the edge distance.

    For g > 0 the unknown is d = supp_- - z > 0; for g < 0 it is
    d = z - supp_+.  |G| decreases in d, so bisection is done on log d.
    """
    s = m.support()
    left = g > 0
    edge = s.lower if left else s.upper
    sign = -1.0 if left else 1.0
    target = abs(g)

    def H(d):
        z = edge + sign * d
        return abs(g_value(m, z))

    def dH(d):
        z = edge + sign * d
        return g_deriv(m, z, 1)  # |d/dd G(edge -/+ d)| = G'(z) in both branches

    lo, hi = None, None
    d = 1.0
    h = H(d)
    if h > target:
        lo = d
        for _ in range(2000):
            d *= 2.0
            h = H(d)
            if h <= target:
                hi = d
                break
            lo = d
    else:
        hi = d
        for _ in range(1100):
            d *= 0.5
            if edge + sign * d == edge:
                # g is within rounding of g*; the nearest float outside is the answer
                return math.nextafter(edge, sign * INF)
            h = H(d)
            if h >= target:
                lo = d
                break
            hi = d
    if lo is None or hi is None:
        raise OutOfRange(f"could not bracket G^-1({g})")
    if h == target:
        return edge + sign * d
    # Newton from the bracket end closer in value
    d = hi if abs(H(hi) - target) < abs(H(lo) - target) else lo
    tol = 1e-15 * max(1.0, target)
    for _ in range(200):
        h = H(d)
        r = h - target
        if abs(r) <= tol:
            break
        if r > 0:
            lo = max(lo, d)
        else:
            hi = min(hi, d)
        if hi - lo <= 4 * _EPS * hi:
            break
        slope = dH(d)
        step = r / slope if slope > 0 and math.isfinite(slope) else math.nan
        nd = d + step
        if not (lo < nd < hi) or not math.isfinite(nd):
            nd = math.sqrt(lo * hi)
        d = nd
    return edge + sign * d


def g_inverse(m: Measure, g: float) -> float:
    """The unique z < supp_- with G_m(z) = g, for 0 < g < g_star."""
    ed = edge_data(m)
    if not (0.0 < g < ed.g_star):
        raise OutOfRange(f"g={g!r} not in (0, {ed.g_star})")
    return _inverse_branch(m, g)


def _inverse_branch(m: Measure, g: float) -> float:
    """Inverse on either real branch: g > 0 gives z < supp_-, g < 0 gives z > supp_+."""
    a = _single_atom(m)
    if a is not None:
        return a - 1.0 / g
    if isinstance(m, Semicircle):
        return -m.beta**2 * g - 1.0 / g
    if isinstance(m, MarchenkoPastur):
        return m.beta / (1.0 + g) - 1.0 / g
    return _invert_numeric(m, g)


def g_inverse_any(m: Measure, g: float) -> float:
    """Inverse of G on (g_plus, 0) U (0, g_star)."""
    ed = edge_data(m)
    if not (ed.g_plus < g < ed.g_star) or g == 0.0:
        raise OutOfRange(f"g={g!r} not in ({ed.g_plus}, 0) U (0, {ed.g_star})")
    return _inverse_branch(m, g)


def g_inverse_extended(m: Measure, g: float) -> float:
    """G^[-1](g) = R_m(-g) - 1/g, valid on the extended domain of R."""
    from .rtransform import r_transform

    if g == 0.0:
        raise OutOfDomain("g must be nonzero")
    rt = r_transform(m)
    return rt.value(-g) - 1.0 / g
