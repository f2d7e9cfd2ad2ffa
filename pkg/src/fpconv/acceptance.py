"""Acceptance suite: ten oracle and property checks with runtime budgets.

Each check returns a :class:`CriterionResult`; ``run_all`` runs them in
order.  Used by ``fpconv selftest`` and by the test-suite.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .errors import OutOfDomain
from .freeconv import (
    CriticalKind,
    CriticalSource,
    classify_critical_points,
    conv_stieltjes,
    endpoint_summary,
    f_deriv,
    f_value,
    fixed_point_residual,
)
from .measures import JacobiDensity, MarchenkoPastur, Semicircle, delta, two_atom
from .montecarlo import EnsembleSpec, run_ensemble
from .potential import e_deriv, e_value, emit_profile, u_direct, u_variational
from .rtransform import RTransformReal
from .stieltjes import g_inverse

DEFAULT_SEED = 20240917


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    worst: float
    tolerance: float
    elapsed: float
    budget: float
    detail: str = ""

    @property
    def within_budget(self) -> bool:
        return self.elapsed <= self.budget

    def line(self) -> str:
        status = "PASS" if self.passed and self.within_budget else "FAIL"
        note = "" if self.within_budget else " (over time budget)"
        return (
            f"[{status}] {self.number:2d} {self.name}: worst={self.worst:.3e} tol={self.tolerance:.1e} "
            f"time={self.elapsed:.2f}s/{self.budget:.0f}s{note}"
            + (f" {self.detail}" if self.detail else "")
        )


def _timed(number: int, name: str, tol: float, budget: float, body: Callable[[], tuple[float, bool, str]]):
    t0 = time.perf_counter()
    worst, ok, detail = body()
    return CriterionResult(number, name, ok, worst, tol, time.perf_counter() - t0, budget, detail)


def _u_sc(beta: float, z: float) -> float:
    g = 2.0 / (-z + math.sqrt(z * z - 4 * beta * beta))
    return 0.5 * beta * beta * g * g - math.log(g)


# ---------------------------------------------------------------------------


def semicircle_self_consistency() -> CriterionResult:
    tol = 1e-8

    def body():
        worst = 0.0
        for beta in (0.5, 1.0, 2.0):
            mu = Semicircle(beta)
            zs = endpoint_summary(mu, delta(0.0)).z_star
            for z in np.linspace(zs - 4.0, zs - 1e-3, 50):
                u = u_variational(mu, delta(0.0), float(z)).u
                worst = max(worst, abs(u - u_direct(mu, float(z))))
        return worst, worst <= tol, ""

    return _timed(1, "semicircle self-consistency", tol, 5.0, body)


def r_additivity() -> CriterionResult:
    tol = 1e-8

    def body():
        worst = 0.0
        for b1, b2 in ((1.0, 1.0), (0.5, 2.0), (1.5, 0.3)):
            b = math.hypot(b1, b2)
            mu, nu = Semicircle(b1), Semicircle(b2)
            s = endpoint_summary(mu, nu)
            g_exact = 1.0 / b
            h_exact = g_inverse(nu, g_exact) if g_exact < 1.0 / b2 else -2.0 * b2
            worst = max(worst, abs(s.g_star - g_exact), abs(s.z_star + 2 * b), abs(s.h_star - h_exact))
            for z in np.linspace(-2 * b - 4.0, -2 * b - 1e-3, 50):
                worst = max(worst, abs(u_variational(mu, nu, float(z)).u - _u_sc(b, float(z))))
        return worst, worst <= tol, ""

    return _timed(2, "R-additivity (sc + sc)", tol, 5.0, body)


def mp_shift() -> CriterionResult:
    tol = 1e-9

    def body():
        worst = 0.0
        for beta in (0.5, 1.0, 2.0):
            mu = MarchenkoPastur(beta)
            for a in (-1.0, 0.0, 3.0):
                zs = endpoint_summary(mu, delta(a)).z_star
                worst = max(worst, abs(zs - (a + mu.support().lower)))
        return worst, worst <= tol, ""

    return _timed(3, "MP shift identity", tol, 1.0, body)


def _random_pairs():
    mus = [Semicircle(1.0), Semicircle(0.4), MarchenkoPastur(0.5), MarchenkoPastur(2.0), MarchenkoPastur(1.0),
           JacobiDensity(-1.0, 1.0, 0.5, 0.5), JacobiDensity(0.0, 2.0, 1.5, 0.5)]
    nus = [delta(0.0), two_atom(-1.0, 1.0), two_atom(-0.3, 2.0, 0.25), Semicircle(0.7), MarchenkoPastur(0.5),
           JacobiDensity(-1.0, 1.0, 0.5, 0.5), JacobiDensity(-2.0, 1.0, 2.0, 0.0)]
    return mus, nus


def fixed_point_residuals(seed: int = DEFAULT_SEED) -> CriterionResult:
    tol = 1e-9

    def body():
        rng = np.random.default_rng(seed)
        mus, nus = _random_pairs()
        worst = 0.0
        for _ in range(200):
            mu = mus[rng.integers(len(mus))]
            nu = nus[rng.integers(len(nus))]
            zs = endpoint_summary(mu, nu).z_star
            z = zs - float(np.exp(rng.uniform(math.log(1e-4), math.log(10.0))))
            g, _h = conv_stieltjes(mu, nu, z)
            worst = max(worst, fixed_point_residual(mu, nu, z, g))
        return worst, worst <= tol, ""

    return _timed(4, "fixed-point residual", tol, 10.0, body)


def _trichotomy_ok(mu, nu) -> tuple[bool, str]:
    s = endpoint_summary(mu, nu)
    zs = s.z_star
    for dz in (1e-3, 0.3):
        if len(classify_critical_points(mu, nu, zs + dz)) != 0:
            return False, f"critical point above z* for {mu}, {nu}"
    at = classify_critical_points(mu, nu, zs)
    if math.isfinite(s.g_star):
        if at.kinds() != [CriticalKind.Inflection] or abs(at.points[0].g - s.g_star) > 1e-6 * max(1, s.g_star):
            return False, f"z = z* gives {at.kinds()} for {mu}, {nu}"
    elif len(at) != 0:
        # hard edge: g* = inf lies outside the scanned range
        return False, f"z = z* with g* = inf gives {at.kinds()} for {mu}, {nu}"
    for dz in (1e-3, 0.3, 3.0):
        z = zs - dz
        rep = classify_critical_points(mu, nu, z)
        pts = list(rep)
        g1, _ = conv_stieltjes(mu, nu, z)
        if not pts or pts[0].kind != CriticalKind.LocalMin or abs(pts[0].g - g1) > 1e-8 * max(1.0, g1):
            return False, f"no leading local min at z*-{dz} for {mu}, {nu}"
        if not pts[0].g < s.g_star:
            return False, f"local min not in (0, g*) for {mu}, {nu}"
        rest = pts[1:]
        if len(rest) > 1 or (rest and rest[0].kind != CriticalKind.LocalMax):
            return False, f"extra critical points {rep.kinds()} at z*-{dz} for {mu}, {nu}"
    return True, ""


def trichotomy() -> CriterionResult:
    def body():
        for mu in (Semicircle(1.0), MarchenkoPastur(1.0)):
            for nu in (delta(0.0), two_atom(-1.0, 1.0), JacobiDensity(-1.0, 1.0, 0.5, 0.5)):
                ok, why = _trichotomy_ok(mu, nu)
                if not ok:
                    return 1.0, False, why
        return 0.0, True, ""

    return _timed(5, "critical-point trichotomy", 0.0, 10.0, body)


def derivative_identities(seed: int = DEFAULT_SEED) -> CriterionResult:
    tol = 1e-6

    def body():
        rng = np.random.default_rng(seed + 1)
        pairs = [(Semicircle(1.0), two_atom(-1.0, 1.0)), (MarchenkoPastur(0.5), JacobiDensity(-1.0, 1.0, 0.5, 0.5)),
                 (JacobiDensity(-1.0, 1.0, 0.5, 0.5), Semicircle(0.5)), (MarchenkoPastur(2.0), delta(1.0))]
        worst = 0.0
        # U' = -G
        for i in range(20):
            mu, nu = pairs[i % len(pairs)]
            zs = endpoint_summary(mu, nu).z_star
            z = zs - float(rng.uniform(0.1, 5.0))
            h = 1e-4
            du = (u_variational(mu, nu, z + h, verify=False).u - u_variational(mu, nu, z - h, verify=False).u) / (2 * h)
            worst = max(worst, abs(du + conv_stieltjes(mu, nu, z)[0]))
        # E' against differences of E
        checked = 0
        while checked < 100:
            mu, nu = pairs[checked % len(pairs)]
            zs = endpoint_summary(mu, nu).z_star
            z = zs - float(rng.uniform(0.1, 5.0))
            g1, _ = conv_stieltjes(mu, nu, z)
            g = g1 * float(rng.uniform(0.2, 1.5))
            h = 1e-5 * g
            try:
                fd = (e_value(mu, nu, z, g + h) - e_value(mu, nu, z, g - h)) / (2 * h)
                worst = max(worst, abs(fd - e_deriv(mu, nu, z, g)))
                checked += 1
            except OutOfDomain:  # g left the energy domain; draw again
                continue
        # F' against differences of F
        for i in range(100):
            mu, nu = pairs[i % len(pairs)]
            s = endpoint_summary(mu, nu)
            hh = s.h_star - float(np.exp(rng.uniform(math.log(0.05), math.log(5.0))))
            d = 1e-5 * max(1.0, abs(hh))
            fd = (f_value(mu, nu, hh + d) - f_value(mu, nu, hh - d)) / (2 * d)
            worst = max(worst, abs(fd - f_deriv(mu, nu, hh)))
        return worst, worst <= tol, ""

    return _timed(6, "derivative identities", tol, 5.0, body)


def monte_carlo(seed: int = DEFAULT_SEED, n: int = 1000, trials: int = 20) -> CriterionResult:
    tol_edge, tol_u = 0.1, 0.05

    def body():
        nu = two_atom(-1.0, 1.0)
        spec = EnsembleSpec("GOE", 1.0, nu, n, trials, seed)
        zs = endpoint_summary(Semicircle(1.0), nu).z_star
        run = run_ensemble(spec, zs - 0.5)
        s = run.summary()
        e_edge, e_u = s["edge_abs_error"], s["abs_error"]
        ok = e_edge <= tol_edge and e_u <= tol_u
        return e_u, ok, f"edge_err={e_edge:.4f} (tol {tol_edge}) u_err={e_u:.5f}"

    return _timed(7, "Monte Carlo edge and potential", tol_u, 180.0, body)


def tail_normalization() -> CriterionResult:
    tol = 1e-4

    def body():
        worst = 0.0
        z = -1e4
        for mu, nu in ((Semicircle(1.0), delta(0.0)), (Semicircle(1.0), two_atom(-1.0, 1.0)),
                       (MarchenkoPastur(0.5), delta(-0.5))):
            worst = max(worst, abs(u_variational(mu, nu, z).u - math.log(abs(z))))
        return worst, worst <= tol, ""

    return _timed(8, "tail normalization", tol, 1.0, body)


def support_sandwich() -> CriterionResult:
    slack = 1e-12

    def body():
        pairs = [(Semicircle(1.0), two_atom(-1.0, 1.0)), (Semicircle(1.0), Semicircle(2.0)),
                 (Semicircle(0.5), JacobiDensity(-1.0, 1.0, 0.5, 0.5)),
                 (JacobiDensity(-2.0, 2.0, 1.0, 1.0), two_atom(-0.5, 0.5)), (Semicircle(2.0), delta(0.0))]
        worst = 0.0
        for mu, nu in pairs:
            zs = endpoint_summary(mu, nu).z_star
            wm, wn = mu.support().width, nu.support().width
            lo, hi = max(wm, wn), wm + wn
            v = 2 * abs(zs)
            viol = max(lo - v, v - hi, 0.0)
            worst = max(worst, viol)
        return worst, worst <= slack, ""

    return _timed(9, "support sandwich", slack, 1.0, body)


# energy-landscape panels: R-transform (or measure), nu, z
LANDSCAPE_PANELS = {
    "a": (MarchenkoPastur(0.5), two_atom(-1.0, 1.0), -1.5),
    "b": (Semicircle(1.0), two_atom(-1.0, 1.0), -3.0),
    "c": (RTransformReal.from_polynomial([0.0, 1.0, 1.0 / 6.0]), two_atom(-1.17, -0.17), -2.77),
    "d": (RTransformReal.from_polynomial([0.0, 1.0, 1.0 / 4.5, 1.0 / 80.0]), two_atom(-1.17, -0.17), -2.53725),
}


def _panel_check(key: str) -> tuple[bool, str]:
    mu, nu, z = LANDSCAPE_PANELS[key]
    s = endpoint_summary(mu, nu)
    tables = {k: emit_profile(mu, nu, z, k) for k in ("e", "f", "ginv", "j") if not (k == "j" and key in "cd")}
    e_ann = [(g, v, k) for g, v, k in tables["e"].annotations if k != "g_star"]
    kinds = [k for _, _, k in e_ann]
    inside = [a for a in e_ann if a[0] < s.g_star]
    beyond = [a for a in e_ann if a[0] > s.g_star]
    if key == "d":
        if not z > s.z_star or abs(s.z_star - (-2.63725)) > 1e-5:
            return False, f"panel d edge {s.z_star}"
        if inside or CriticalKind.LocalMin.value not in [k for _, _, k in beyond]:
            return False, f"panel d kinds {kinds}"
        return True, ""
    g1, _ = conv_stieltjes(mu, nu, z)
    if len(inside) != 1 or inside[0][2] != CriticalKind.LocalMin.value or abs(inside[0][0] - g1) > 1e-8 * g1:
        return False, f"panel {key}: g1 is not the only critical point in (0, g*): {kinds}"
    u1 = inside[0][1]
    if key == "a":
        return (kinds == ["LocalMin"], f"panel a kinds {kinds}")
    if key == "b":
        rep = classify_critical_points(mu, nu, z)
        top = rep.scan_upper
        low_end = e_value(mu, nu, z, top * (1 - 1e-9))
        ok = kinds == ["LocalMin", "LocalMax"] and low_end < u1
        return ok, f"panel b kinds {kinds}, E near the domain end {low_end:.3f} vs E(g1) {u1:.3f}"
    rep = classify_critical_points(mu, nu, z)
    lower_min = [p for p in rep if p.kind == CriticalKind.LocalMin and p.g > s.g_star
                 and e_value(mu, nu, z, p.g) < u1]
    sources = {p.source for p in rep}
    ok = kinds == ["LocalMin", "LocalMax", "LocalMin", "LocalMax"] and lower_min and CriticalSource.RPrimeZero in sources
    return bool(ok), f"panel c kinds {kinds}"


def landscape_panels() -> CriterionResult:
    def body():
        for key in "abcd":
            ok, why = _panel_check(key)
            if not ok:
                return 1.0, False, why
        return 0.0, True, ""

    return _timed(10, "energy-landscape panels", 0.0, 10.0, body)


CRITERIA = [
    semicircle_self_consistency,
    r_additivity,
    mp_shift,
    fixed_point_residuals,
    trichotomy,
    derivative_identities,
    monte_carlo,
    tail_normalization,
    support_sandwich,
    landscape_panels,
]


def run_all(only: list[int] | None = None, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    _kernels.warmup()
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        res = fn()
        out.append(res)
        if echo is not None:
            echo(res.line())
    return out
