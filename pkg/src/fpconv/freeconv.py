"""Left edge and Stieltjes transform of a free additive convolution.

Everything is driven by ``F(h) = R_mu(-G_nu(h)) + h`` on
``dom F = {h < supp_- nu : G_nu(h) in -D_mu}``, an interval (-inf, h_max).
F increases from -inf; ``h*`` is its leftmost critical point (or ``h_max``),
``z* = F(h*)`` is the left edge of mu [+] nu, ``g* = G_nu(h*)``, and for
``z < z*`` the leftmost root ``h<`` of ``F(h) = z`` gives
``G_{mu [+] nu}(z) = G_nu(h<)``.

Scans use the substitution ``h = h_max - exp(s)``, which resolves both the far
left tail and the neighbourhood of the domain endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import BeyondEdge, DegenerateMu, OutOfDomain
from .measures import MarchenkoPastur, Measure, Semicircle
from .rtransform import RTransformReal, as_rtransform
from .stieltjes import INF, edge_data, g_deriv, g_inverse, g_value

GRID_POINTS = 256
TOUCH_TOL = 1e-10  # |F - z| below TOUCH_TOL * max(1, |z|) at an extremum counts as tangency
_EPS = 2.220446049250313e-16


class HStarKind(str, Enum):
    CriticalPoint = "CriticalPoint"
    DomainEndpoint = "DomainEndpoint"


class CriticalKind(str, Enum):
    LocalMin = "LocalMin"
    LocalMax = "LocalMax"
    Inflection = "Inflection"


class CriticalSource(str, Enum):
    FixedPoint = "FixedPoint"
    RPrimeZero = "RPrimeZero"


@dataclass(frozen=True)
class ConvolutionSummary:
    h_star: float
    g_star: float
    z_star: float
    h_star_kind: HStarKind
    f_domain_upper: float

    def to_json(self) -> dict:
        return {
            "h_star": self.h_star,
            "g_star": self.g_star,
            "z_star": self.z_star,
            "h_star_kind": self.h_star_kind.value,
            "f_domain_upper": self.f_domain_upper,
        }


@dataclass(frozen=True)
class CriticalPoint:
    g: float
    kind: CriticalKind
    source: CriticalSource
    h: float | None = None


@dataclass(frozen=True)
class CriticalPointReport:
    z: float
    points: tuple[CriticalPoint, ...]
    scan_upper: float

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def kinds(self) -> list[CriticalKind]:
        return [p.kind for p in self.points]


# ---------------------------------------------------------------------------
# the pair (mu, nu)


@dataclass(frozen=True)
class _Pair:
    rt: RTransformReal
    nu: Measure
    nu_lower: float
    g_cap: float  # sup(-D_mu)
    g_top: float  # G_nu(h_max): min(g_cap, g*_nu)
    h_max: float
    scale: float

    def h_of(self, s: float) -> float:
        return self.h_max - math.exp(s)

    def s_of(self, h: float) -> float:
        return math.log(self.h_max - h)


@lru_cache(maxsize=256)
def _pair(mu, nu: Measure) -> _Pair:
    rt = as_rtransform(mu)
    if rt.is_degenerate:
        raise DegenerateMu("the first measure must not be a single atom")
    if not isinstance(nu, Measure):
        raise TypeError("the second argument must be a Measure")
    lo_nu = nu.support().lower
    g_cap = -rt.domain[0]
    g_star_nu = edge_data(nu).g_star
    if g_cap < g_star_nu:
        h_max = g_inverse(nu, g_cap)
        g_top = g_cap
    else:
        h_max = lo_nu
        g_top = g_star_nu
    spread = math.sqrt(abs(rt.deriv(0.0)))
    scale = 1.0 + nu.support().width + spread
    return _Pair(rt, nu, lo_nu, g_cap, g_top, h_max, scale)


def _f(p: _Pair, h: float) -> float:
    if not h < p.nu_lower:
        raise OutOfDomain(f"h={h!r} is not left of supp nu")
    g = g_value(p.nu, h)
    if not p.rt.in_domain(-g):
        raise OutOfDomain(f"G_nu({h!r}) = {g!r} outside -D_mu")
    return p.rt.value(-g) + h


def _fprime_terms(p: _Pair, h: float) -> tuple[float, float]:
    """(F'(h), magnitude of the subtracted term) for round-off thresholds."""
    if not h < p.nu_lower:
        raise OutOfDomain(f"h={h!r} is not left of supp nu")
    g = g_value(p.nu, h)
    if not p.rt.in_domain(-g):
        raise OutOfDomain(f"G_nu({h!r}) = {g!r} outside -D_mu")
    term = p.rt.deriv(-g) * g_deriv(p.nu, h, 1)
    return 1.0 - term, abs(term)


def f_value(mu, nu: Measure, h: float) -> float:
    """F(h) = R_mu(-G_nu(h)) + h."""
    return _f(_pair(mu, nu), h)


def f_deriv(mu, nu: Measure, h: float) -> float:
    """F'(h) = 1 - R_mu'(-G_nu(h)) G_nu'(h)."""
    return _fprime_terms(_pair(mu, nu), h)[0]


# ---------------------------------------------------------------------------
# scanning helpers


def _s_range(p: _Pair, h_left: float | None = None) -> tuple[float, float]:
    s_hi = math.log(1e3 * p.scale) if h_left is None else p.s_of(h_left)
    s_lo = math.log(1e-14 * p.scale)
    return s_lo, s_hi


def _sample(func, s_values):
    """Evaluate func on s_values (ordered left to right in h); stop at domain failure."""
    vals = []
    for s in s_values:
        try:
            vals.append(func(s))
        except OutOfDomain:
            break
    return vals


def _find_first_negative(func, s_values, tol_of):
    """First point where ``func`` (positive at the left) becomes negative.

    ``s_values`` is ordered left to right in h (decreasing s).  ``func``
    returns (value, term_magnitude); values within ``tol_of(term)`` of zero
    count as zero.  Returns ("cross", s_left, s_right), ("touch", s, None) or
    None.  Dips that do not show on the grid are found by refining around
    grid local minima.
    """
    vals = _sample(func, s_values)
    n = len(vals)
    v = [a for a, _ in vals]
    tol = [tol_of(b) for _, b in vals]
    first = next((i for i in range(n) if v[i] < -tol[i]), None)
    limit = first if first is not None else n
    for j in range(1, min(limit, n - 1)):
        if v[j] <= v[j - 1] and v[j] <= v[j + 1] and (v[j] < v[j - 1] or v[j] < v[j + 1]):
            a, b = s_values[j + 1], s_values[j - 1]
            res = minimize_scalar(lambda s: func(s)[0], bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-12 * max(1.0, abs(a))})
            vmin, term = func(res.x)
            if vmin < -tol_of(term):
                return ("cross", s_values[j - 1], res.x)
            if vmin <= tol_of(term):
                return ("touch", res.x, None)
    if first is None:
        return None
    if first == 0:
        raise OutOfDomain("scan started inside the negative region")
    return ("cross", s_values[first - 1], s_values[first])


def _tol_fprime(term: float) -> float:
    return 64 * _EPS * (1.0 + term)


def _richardson_limit(p: _Pair) -> float:
    vals = []
    for k in range(6, 15):
        h = p.h_max - p.scale * 10.0 ** (-k)
        try:
            vals.append(_f(p, h))
        except OutOfDomain:
            break
    if len(vals) < 3:
        return vals[-1]
    a, b, c = vals[-3:]
    den = (c - b) - (b - a)
    if den != 0.0 and abs(c - b) < abs(b - a):
        return c - (c - b) ** 2 / den
    return c


def _endpoint_limit(p: _Pair) -> tuple[float, float]:
    """(g*, z*) when h* is the domain endpoint."""
    rt = p.rt
    if p.h_max < p.nu_lower:
        # G_nu(h_max) = sup(-D_mu); only a finite natural domain gets here
        g = p.g_cap
        if rt.measure is not None and rt.d_extended is None:
            lower_mu = rt.measure.support().lower
            return g, p.h_max + lower_mu + 1.0 / g
        return g, _richardson_limit(p)
    g = p.g_top
    if math.isfinite(g):
        if rt.in_domain(-g):
            return g, rt.value(-g) + p.h_max
        return g, _richardson_limit(p)
    lim = rt.limit_neg_inf()
    if lim is not None and math.isfinite(lim):
        return INF, lim + p.h_max
    if lim == INF:
        raise OutOfDomain("F is unbounded at the domain endpoint; no finite left edge")
    return INF, _richardson_limit(p)


@lru_cache(maxsize=256)
def _summary(p: _Pair) -> ConvolutionSummary:
    s_lo, s_hi = _s_range(p)
    s_grid = np.linspace(s_hi, s_lo, GRID_POINTS)

    def fp(s):
        return _fprime_terms(p, p.h_of(s))

    hit = _find_first_negative(fp, list(s_grid), _tol_fprime)
    if hit is None:
        g_star, z_star = _endpoint_limit(p)
        return ConvolutionSummary(p.h_max, g_star, z_star, HStarKind.DomainEndpoint, p.h_max)
    if hit[0] == "touch":
        s_star = hit[1]
    else:
        s_star = brentq(lambda s: fp(s)[0], hit[2], hit[1], xtol=1e-15, rtol=4 * _EPS, maxiter=200)
    h_star = p.h_of(s_star)
    return ConvolutionSummary(
        h_star, g_value(p.nu, h_star), _f(p, h_star), HStarKind.CriticalPoint, p.h_max
    )


def endpoint_summary(mu, nu: Measure) -> ConvolutionSummary:
    """(h*, g*, z*) for mu [+] nu; ``mu`` may be a Measure or an RTransformReal."""
    return _summary(_pair(mu, nu))


# ---------------------------------------------------------------------------
# G of the convolution


def _bracket_left(p: _Pair, z: float, h_right: float) -> float:
    step = p.scale
    h = min(h_right - step, z - p.rt.value(0.0) - step)
    for _ in range(200):
        if _f(p, h) < z:
            return h
        step *= 2.0
        h -= step
    raise OutOfDomain("could not bracket F(h) = z from the left")


def _h_less(p: _Pair, summ: ConvolutionSummary, z: float) -> float:
    if summ.h_star_kind == HStarKind.CriticalPoint:
        h_right = summ.h_star
    else:
        h_right = None
        for k in range(0, 16):
            h = p.h_max - p.scale * 10.0 ** (-k)
            if _f(p, h) > z:
                h_right = h
                break
        if h_right is None:
            raise BeyondEdge(f"z={z!r} is too close to the edge z*={summ.z_star!r}")
    if _f(p, h_right) == z:
        return h_right
    h_left = _bracket_left(p, z, h_right)
    return brentq(lambda h: _f(p, h) - z, h_left, h_right, xtol=1e-300, rtol=4 * _EPS, maxiter=300)


def conv_stieltjes(mu, nu: Measure, z: float) -> tuple[float, float]:
    """(G_{mu [+] nu}(z), h<(z)) for z < z*."""
    p = _pair(mu, nu)
    summ = _summary(p)
    if not z < summ.z_star:
        raise BeyondEdge(f"z={z!r} is not left of the edge z*={summ.z_star!r}")
    h = _h_less(p, summ, z)
    return g_value(p.nu, h), h


def fixed_point_residual(mu, nu: Measure, z: float, g: float) -> float:
    """|G_nu(z - R_mu(-g)) - g|."""
    p = _pair(mu, nu)
    w = z - p.rt.value(-g)
    return abs(g_value(p.nu, w) - g)


def h_greater(mu, nu: Measure, z: float) -> float | None:
    """Second root of F(h) = z from the left, or None if F stays above z."""
    p = _pair(mu, nu)
    summ = _summary(p)
    if not z < summ.z_star:
        raise BeyondEdge(f"z={z!r} is not left of the edge z*={summ.z_star!r}")
    h1 = _h_less(p, summ, z)
    start = summ.h_star if summ.h_star_kind == HStarKind.CriticalPoint else h1
    s_lo, s_hi = _s_range(p, start)
    if s_hi <= s_lo:
        return None
    s_grid = list(np.linspace(s_hi, s_lo, GRID_POINTS))

    def fz(s):
        return _f(p, p.h_of(s)) - z, abs(z)

    hit = _find_first_negative(fz, s_grid, lambda t: 0.0)
    if hit is None or hit[0] == "touch":
        return None if hit is None else p.h_of(hit[1])
    s = brentq(lambda s: fz(s)[0], hit[2], hit[1], xtol=1e-15, rtol=4 * _EPS, maxiter=200)
    return p.h_of(s)


# ---------------------------------------------------------------------------
# critical points of E


def e_prime(rt: RTransformReal, nu: Measure, z: float, g: float) -> float:
    """E'(g) = R'(-g) (g - G_nu(z - R(-g)))."""
    w = z - rt.value(-g)
    return rt.deriv(-g) * (g - g_value(nu, w))


def in_e_domain(rt: RTransformReal, nu: Measure, z: float, g: float) -> bool:
    if not rt.in_domain(-g):
        return False
    return z - rt.value(-g) < nu.support().lower


def e_domain_upper(mu, nu: Measure, z: float) -> float:
    """Right end of the component of the energy domain that contains 0+."""
    p = _pair(mu, nu)
    rt = p.rt
    lo_nu = p.nu_lower
    m = rt.measure
    cap = -rt.domain[0]
    if m is not None and isinstance(m, Semicircle):
        return (lo_nu - z) / m.beta**2 if z < lo_nu else 0.0
    if m is not None and isinstance(m, MarchenkoPastur):
        if z - lo_nu <= 0:
            return INF
        return max(m.beta / (z - lo_nu) - 1.0, 0.0)

    def phi(g):
        return lo_nu - z + rt.value(-g)  # > 0 inside

    if phi(0.0) <= 0:
        return 0.0
    top = cap if math.isfinite(cap) else 1e8 * p.scale
    grid = np.geomspace(1e-10 * p.scale, top * (1 - 1e-12), 400)
    prev = 0.0
    for g in grid:
        try:
            val = phi(g)
        except OutOfDomain:
            return prev
        if val <= 0:
            return brentq(phi, prev, g, xtol=1e-15, rtol=4 * _EPS)
        prev = g
    return cap


def _fz_roots(p: _Pair, z: float, touch_tol: float) -> list[tuple[float, bool]]:
    """All roots h of F(h) = z in dom F as (h, tangent) pairs, left to right."""
    s_lo, s_hi = _s_range(p)
    while True:
        try:
            if _f(p, p.h_of(s_hi)) < z:
                break
        except OutOfDomain:
            pass
        s_hi += 1.0
    s_grid = list(np.linspace(s_hi, s_lo, 2 * GRID_POINTS))

    def fz(s):
        return _f(p, p.h_of(s)) - z

    vals = _sample(fz, s_grid)
    n = len(vals)
    roots: list[tuple[float, bool]] = []
    for i in range(n - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append((s_grid[i], False))
        elif a * b < 0:
            roots.append((brentq(fz, s_grid[i + 1], s_grid[i], xtol=1e-15, rtol=4 * _EPS), False))
        if 0 < i and vals[i - 1] * a > 0 and a * b > 0:
            prev = vals[i - 1]
            strict = a != prev or a != b
            if strict and a < 0 and a >= prev and a >= b:
                sgn = -1.0
            elif strict and a > 0 and a <= prev and a <= b:
                sgn = 1.0
            else:
                sgn = 0.0
            if sgn != 0.0:
                lo_s, hi_s = s_grid[i + 1], s_grid[i - 1]
                res = minimize_scalar(lambda s: sgn * fz(s), bounds=(lo_s, hi_s), method="bounded",
                                      options={"xatol": 1e-13 * max(1.0, abs(lo_s))})
                ext = fz(res.x)
                if abs(ext) <= touch_tol:
                    s_t = res.x
                    try:
                        s_t = brentq(lambda s: _fprime_terms(p, p.h_of(s))[0], lo_s, hi_s,
                                     xtol=1e-15, rtol=4 * _EPS)
                    except ValueError:
                        pass
                    roots.append((s_t, True))
                elif sgn * ext < 0:
                    roots.append((brentq(fz, res.x, hi_s, xtol=1e-15, rtol=4 * _EPS), False))
                    roots.append((brentq(fz, lo_s, res.x, xtol=1e-15, rtol=4 * _EPS), False))
    roots = sorted(((p.h_of(s), t) for s, t in roots), key=lambda r: r[0])
    return roots


def classify_critical_points(mu, nu: Measure, z: float, touch_tol: float | None = None) -> CriticalPointReport:
    """Critical points of g -> E(g) on (0, scan_upper) with their kinds."""
    p = _pair(mu, nu)
    rt = p.rt
    if touch_tol is None:
        touch_tol = TOUCH_TOL * max(1.0, abs(z))
    upper = min(e_domain_upper(mu, nu, z), p.g_top)
    found: list[tuple[float, CriticalSource, float | None]] = []
    for h, _tangent in _fz_roots(p, z, touch_tol):
        g = g_value(p.nu, h)
        if 0.0 < g < upper:
            found.append((g, CriticalSource.FixedPoint, h))
    for g in rt.rprime_zeros(0.0, upper):
        if in_e_domain(rt, p.nu, z, g):
            found.append((g, CriticalSource.RPrimeZero, None))
    found.sort(key=lambda c: c[0])
    bounds = [0.0] + [c[0] for c in found] + [upper]
    signs = []
    for a, b in zip(bounds, bounds[1:]):
        mid = 0.5 * (a + b) if math.isfinite(b) else 2.0 * a + 1.0
        signs.append(np.sign(e_prime(rt, p.nu, z, mid)))
    points = []
    for i, (g, src, h) in enumerate(found):
        left, right = signs[i], signs[i + 1]
        if left < 0 < right:
            kind = CriticalKind.LocalMin
        elif left > 0 > right:
            kind = CriticalKind.LocalMax
        else:
            kind = CriticalKind.Inflection
        points.append(CriticalPoint(g, kind, src, h))
    return CriticalPointReport(z, tuple(points), upper)
