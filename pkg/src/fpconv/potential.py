"""Logarithmic potential of a free additive convolution.

``U(z) = int log(x - z) d(mu [+] nu)(x)`` for z left of the support equals the
minimum over g in (0, g*) of the energy

    E(g) = int_0^g s R_mu'(-s) ds + int log(x - z + R_mu(-g)) dnu(x),

attained at ``g = G_{mu [+] nu}(z)``.  This module evaluates E and E', the
variational potential (at the root, cross-checked by a bounded minimisation),
the direct quadrature potential of a single measure, and sampled profiles of
E, F and the inverse Stieltjes transform for plotting.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import BeyondEdge, InsideOrRightOfSupport, OutOfDomain, OutOfEDomain, VerificationError
from .freeconv import (
    CriticalKind,
    HStarKind,
    _fprime_terms,
    _f,
    _pair,
    classify_critical_points,
    conv_stieltjes,
    e_domain_upper,
    e_prime,
    endpoint_summary,
    fixed_point_residual,
)
from .measures import Atomic, Measure, rule_near
from .rtransform import as_rtransform, r_transform
from .stieltjes import g_inverse, g_value

AGREEMENT_TOL = 1e-8
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class Method(str, Enum):
    VariationalAtRoot = "VariationalAtRoot"
    BoundedMinimization = "BoundedMinimization"


@dataclass(frozen=True)
class PotentialResult:
    u: float
    minimizer_g: float
    e_at_min: float
    fixed_point_residual: float
    method: Method
    z: float = math.nan
    h_less: float = math.nan

    def to_json(self) -> dict:
        return {
            "z": self.z,
            "u": self.u,
            "minimizer_g": self.minimizer_g,
            "e_at_min": self.e_at_min,
            "fixed_point_residual": self.fixed_point_residual,
            "method": self.method.value,
        }


# ---------------------------------------------------------------------------
# direct potential


def u_direct(m: Measure, z: float) -> float:
    """int log(x - z) dm(x) for z < supp_-(m)."""
    lo = m.support().lower
    if not z < lo:
        raise InsideOrRightOfSupport(f"z={z!r} is not left of supp_- = {lo!r}")
    c = lo - z
    if isinstance(m, Atomic):
        x = np.array([a for a, _ in m.atoms])
        w = np.array([wt for _, wt in m.atoms])
    else:
        x, w = rule_near(m, z)
    return math.log(c) + _kernels.log_sum(x, w, lo, c)


# ---------------------------------------------------------------------------
# energy


def _check_e_domain(rt, nu: Measure, z: float, g: float) -> float:
    if not rt.in_domain(-g):
        raise OutOfEDomain(f"-g={-g!r} outside the R-transform domain")
    w = z - rt.value(-g)
    if not w < nu.support().lower:
        raise OutOfEDomain(f"z - R(-g) = {w!r} is not left of supp nu")
    return w


def e_value(mu, nu: Measure, z: float, g: float) -> float:
    """E(g) for g in the energy domain."""
    rt = as_rtransform(mu)
    w = _check_e_domain(rt, nu, z, g)
    return rt.first_term(g) + u_direct(nu, w)


def e_deriv(mu, nu: Measure, z: float, g: float) -> float:
    """E'(g) = R'(-g) (g - G_nu(z - R(-g)))."""
    rt = as_rtransform(mu)
    _check_e_domain(rt, nu, z, g)
    return e_prime(rt, nu, z, g)


def _golden(f, a: float, b: float, xtol: float) -> float:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _search_interval(mu, nu: Measure, z: float, g_star: float, extended: bool) -> tuple[float, float]:
    rt = as_rtransform(mu)
    lo_nu = nu.support().lower
    e_up = e_domain_upper(mu, nu, z)
    if math.isfinite(g_star) and not extended:
        eps = 1e-9 * max(1.0, g_star)
        return eps, min(g_star - eps, e_up * (1 - 1e-12))
    eps = 1e-9
    if math.isfinite(e_up):

        def phi(g):
            return lo_nu - 1e-9 - z + rt.value(-g)

        if phi(e_up * (1 - 1e-12)) < 0 < phi(eps):
            return eps, brentq(phi, eps, e_up * (1 - 1e-12), xtol=1e-15)
        return eps, e_up * (1 - 1e-12)
    hi = 1.0
    for _ in range(200):
        if e_prime(rt, nu, z, hi) > 0:
            break
        hi *= 2.0
    return eps, hi


def _bounded_min(mu, nu: Measure, z: float, g_star: float, extended: bool = False) -> tuple[float, float]:
    rt = as_rtransform(mu)
    a, b = _search_interval(mu, nu, z, g_star, extended)

    def E(g):
        return e_value(rt, nu, z, g)

    g = _golden(E, a, b, 1e-7 * max(1.0, b - a))
    # Newton polish on E' with a finite-difference second derivative
    for _ in range(20):
        d1 = e_prime(rt, nu, z, g)
        h = 1e-6 * max(1e-3, g)
        if not (a < g - h and g + h < b):
            break
        d2 = (e_prime(rt, nu, z, g + h) - e_prime(rt, nu, z, g - h)) / (2 * h)
        if d2 <= 0:
            break
        step = d1 / d2
        g_new = min(max(g - step, a), b)
        if abs(g_new - g) <= 1e-15 * max(1.0, g):
            g = g_new
            break
        g = g_new
    return g, E(g)


def u_variational(
    mu,
    nu: Measure,
    z: float,
    verify: bool = True,
    extended: bool = False,
) -> PotentialResult:
    """U_{mu [+] nu}(z) through the energy minimised at G_{mu [+] nu}(z).

    With ``verify`` a golden-section search plus Newton polish over
    (eps, g* - eps) intersected with the energy domain must reproduce the
    value within 1e-8, otherwise :class:`VerificationError` is raised.
    ``extended`` widens that search beyond g* (only sensible when R' > 0 on
    the whole range).
    """
    rt = as_rtransform(mu)
    summ = endpoint_summary(rt, nu)
    if not z < summ.z_star:
        raise BeyondEdge(f"z={z!r} is not left of the edge z*={summ.z_star!r}")
    g, h = conv_stieltjes(rt, nu, z)
    u = e_value(rt, nu, z, g)
    resid = fixed_point_residual(rt, nu, z, g)
    e_min = u
    if verify:
        if extended:
            upper = e_domain_upper(rt, nu, z)
            probe = np.linspace(0.0, min(upper, 10 * max(1.0, g)), 33)[1:-1]
            if not all(rt.deriv(-t) > 0 for t in probe):
                raise OutOfDomain("R' is not positive on the extended search range")
        g_min, e_min = _bounded_min(rt, nu, z, summ.g_star, extended)
        if abs(e_min - u) > AGREEMENT_TOL * max(1.0, abs(u)):
            raise VerificationError(
                f"root value {u!r} (g={g!r}) and bounded minimum {e_min!r} (g={g_min!r}) disagree"
            )
    return PotentialResult(u, g, e_min, resid, Method.VariationalAtRoot, z, h)


def u_bounded(mu, nu: Measure, z: float, extended: bool = False) -> PotentialResult:
    """Potential from the bounded minimisation alone."""
    rt = as_rtransform(mu)
    summ = endpoint_summary(rt, nu)
    if not z < summ.z_star:
        raise BeyondEdge(f"z={z!r} is not left of the edge z*={summ.z_star!r}")
    g, e = _bounded_min(rt, nu, z, summ.g_star, extended)
    return PotentialResult(e, g, e, fixed_point_residual(rt, nu, z, g), Method.BoundedMinimization, z)


# ---------------------------------------------------------------------------
# profiles


class ProfileKind(str, Enum):
    EProfile = "e"
    FProfile = "f"
    GInvProfile = "ginv"
    JProfile = "j"


@dataclass
class ProfileTable:
    kind: ProfileKind
    abscissa: np.ndarray
    values: np.ndarray
    annotations: list[tuple[float, float, str]] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        text = json.dumps(self.config, sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:12]

    def annotation_kinds(self) -> list[str]:
        return [k for _, _, k in self.annotations]

    def write_csv(self, out_dir: str) -> tuple[str, str]:
        os.makedirs(out_dir, exist_ok=True)
        stem = f"{self.kind.value}_{self.config_hash}"
        main = os.path.join(out_dir, stem + ".csv")
        ann = os.path.join(out_dir, stem + "_annotations.csv")
        with open(main, "w") as fh:
            fh.write("abscissa,value\n")
            for x, y in zip(self.abscissa, self.values):
                fh.write(f"{fmt(x)},{fmt(y)}\n")
        with open(ann, "w") as fh:
            fh.write("abscissa,value,kind\n")
            for x, y, k in self.annotations:
                fh.write(f"{fmt(x)},{fmt(y)},{k}\n")
        return main, ann


def fmt(x: float) -> str:
    """17 significant digits; infinities as inf/-inf."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _grid(spec, lo_open: float, hi_open: float, default) -> np.ndarray:
    start, stop, count = spec if spec is not None else default
    xs = np.linspace(start, stop, int(count))
    xs = xs[(xs > lo_open) & (xs < hi_open)]
    if xs.size == 0:
        raise OutOfDomain("the sampling grid is empty after clipping to the domain")
    return xs


def _safe(fn, xs):
    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        try:
            out[i] = fn(x)
        except OutOfDomain:
            out[i] = math.nan
    keep = np.isfinite(out)
    return xs[keep], out[keep]


def emit_profile(mu, nu: Measure, z: float | None, kind, grid=None) -> ProfileTable:
    """Sample E (needs z), F, G^[-1] of the convolution, or J on a grid.

    ``grid`` is (start, stop, count); by default a range around the relevant
    critical points is chosen.  Annotations carry the critical points.
    """
    kind = ProfileKind(kind) if not isinstance(kind, ProfileKind) else kind
    rt = as_rtransform(mu)
    p = _pair(rt, nu)
    summ = endpoint_summary(rt, nu)
    config = {"mu": rt.to_json(), "nu": nu.to_json(), "z": z, "kind": kind.value, "grid": grid}
    ann: list[tuple[float, float, str]] = []
    gs = summ.g_star

    if kind == ProfileKind.EProfile:
        if z is None:
            raise OutOfDomain("an energy profile needs z")
        report = classify_critical_points(rt, nu, z)
        upper = e_domain_upper(rt, nu, z)
        marks = [c.g for c in report] + ([gs] if math.isfinite(gs) else [])
        top = upper if math.isfinite(upper) else 1.5 * max(marks + [1.0])
        xs = _grid(grid, 0.0, upper, (top * 1e-3, top * (1 - 1e-3), 400))
        xs, ys = _safe(lambda g: e_value(rt, nu, z, g), xs)
        for c in report:
            ann.append((c.g, e_value(rt, nu, z, c.g), c.kind.value))
        if math.isfinite(gs) and gs < upper:
            ann.append((gs, e_value(rt, nu, z, gs), "g_star"))
    elif kind == ProfileKind.FProfile:
        span = max(1.0, p.h_max - summ.h_star)
        xs = _grid(grid, -math.inf, p.h_max, (p.h_max - 4 * span, p.h_max - 0.025 * span, 400))
        xs, ys = _safe(lambda h: _f(p, h), xs)
        ann.extend(_f_extrema(p, xs))
        if z is not None:
            for c in classify_critical_points(rt, nu, z):
                if c.h is not None and xs[0] <= c.h <= xs[-1]:
                    ann.append((c.h, _f(p, c.h), "Root"))
    else:
        if kind == ProfileKind.GInvProfile:

            def curve(g):
                return _f(p, g_inverse(nu, g)) if g < p.g_top else math.nan

            hi = p.g_top
        else:
            rn = r_transform(nu)

            def curve(g):
                return rt.value(-g) + rn.value(-g) - 1.0 / g

            hi = min(-rt.domain[0], -rn.domain[0])
        marks = [gs] if math.isfinite(gs) else [1.0]
        top = min(hi, 3.0 * max(marks))
        xs = _grid(grid, 0.0, hi, (top * 1e-2, top * (1 - 1e-6), 400))
        xs, ys = _safe(curve, xs)
        if math.isfinite(gs):
            ann.append((gs, summ.z_star, "g_star"))
        if z is not None:
            for c in classify_critical_points(rt, nu, z):
                if c.h is not None:
                    ann.append((c.g, z, "Root"))
    order = np.argsort(xs)
    return ProfileTable(kind, xs[order], ys[order], ann, config)


def _f_extrema(p, xs) -> list[tuple[float, float, str]]:
    """Critical points of F inside the sampled range."""
    out = []
    vals = []
    for h in xs:
        try:
            vals.append(_fprime_terms(p, h)[0])
        except OutOfDomain:
            vals.append(math.nan)
    for i in range(len(xs) - 1):
        a, b = vals[i], vals[i + 1]
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        if a == 0.0 or a * b < 0:
            h = xs[i] if a == 0.0 else brentq(lambda t: _fprime_terms(p, t)[0], xs[i], xs[i + 1], xtol=1e-15)
            kind = CriticalKind.LocalMax.value if a >= 0 > b or a > 0 else CriticalKind.LocalMin.value
            out.append((h, _f(p, h), kind))
    return out


def h_star_is_endpoint(mu, nu: Measure) -> bool:
    return endpoint_summary(mu, nu).h_star_kind == HStarKind.DomainEndpoint


def g_of_conv(mu, nu: Measure, z: float) -> float:
    return g_value(nu, conv_stieltjes(mu, nu, z)[1])
