"""Probability measures with compact support and quadrature against them.

Four families are supported: finitely many atoms, the semicircle law, the
Marchenko-Pastur law and Jacobi-type densities ``c (x-a)^p (b-x)^q``.  Each
measure is an immutable (hashable) value.  Internally every measure is a list
of atoms plus a list of :class:`Piece` objects (power-law densities on an
interval, optionally multiplied by ``1/x``).

Integration uses a composite rule that is graded geometrically toward a
user-supplied *near point* outside the support.  The panel touching an edge is
a Gauss-Jacobi rule matched to the edge exponent; interior panels are
Gauss-Legendre.  With 24 nodes per panel and panel ratio 2 this resolves both
the power-law edge and a near-singular integrand such as ``1/(x-z)`` or
``log(x-z)`` to roughly machine precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .errors import MeasureSpecError, NonIntegrable

NODES_PER_PANEL = 24
MAX_GRADING_LEVEL = 60
MASS_TOL = 1e-9


@dataclass(frozen=True)
class SupportInterval:
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class Piece:
    """Density ``c (x-a)^p (b-x)^q`` on [a, b], times ``1/x`` if ``inv_x``.

    ``left_pole`` is the distance from ``a`` to the nearest singularity of the
    smooth factor (0 < left_pole <= inf); it bounds the first panel size.
    """

    a: float
    b: float
    p: float
    q: float
    c: float
    inv_x: bool = False
    left_pole: float = math.inf

    def smooth(self, x: np.ndarray) -> np.ndarray:
        return 1.0 / x if self.inv_x else np.ones_like(x)


class Measure:
    """Base class; concrete families are frozen dataclasses."""

    kind: str = "measure"

    def support(self) -> SupportInterval:  # pragma: no cover - abstract
        raise NotImplementedError

    def atom_list(self) -> tuple[tuple[float, float], ...]:
        return ()

    def pieces(self) -> tuple[Piece, ...]:
        return ()

    @property
    def is_degenerate(self) -> bool:
        atoms = self.atom_list()
        return not self.pieces() and len(atoms) == 1

    def to_json(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class Atomic(Measure):
    """Finite sum of point masses; ``atoms`` is a tuple of (location, weight)."""

    atoms: tuple[tuple[float, float], ...]
    kind: str = field(default="atomic", init=False, repr=False)

    def __post_init__(self):
        atoms = tuple((float(x), float(w)) for x, w in self.atoms)
        if not atoms:
            raise MeasureSpecError("atomic measure needs at least one atom")
        locs = [x for x, _ in atoms]
        if any(not math.isfinite(x) for x in locs):
            raise MeasureSpecError("atom locations must be finite")
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise MeasureSpecError("atom locations must be strictly increasing")
        if any(not (0.0 < w <= 1.0) for _, w in atoms):
            raise MeasureSpecError("atom weights must lie in (0, 1]")
        if abs(sum(w for _, w in atoms) - 1.0) > MASS_TOL:
            raise MeasureSpecError("atom weights must sum to 1")
        object.__setattr__(self, "atoms", atoms)

    def support(self) -> SupportInterval:
        return SupportInterval(self.atoms[0][0], self.atoms[-1][0])

    def atom_list(self):
        return self.atoms

    def to_json(self) -> dict:
        return {"type": "atomic", "atoms": [[x, w] for x, w in self.atoms]}


def delta(a: float = 0.0) -> Atomic:
    return Atomic(((a, 1.0),))


def two_atom(x1: float, x2: float, w1: float = 0.5) -> Atomic:
    return Atomic(((x1, w1), (x2, 1.0 - w1)))


@dataclass(frozen=True)
class Semicircle(Measure):
    """Density ``sqrt(4 beta^2 - x^2) / (2 pi beta^2)`` on [-2 beta, 2 beta]."""

    beta: float = 1.0
    kind: str = field(default="semicircle", init=False, repr=False)

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise MeasureSpecError("semicircle beta must be positive")
        object.__setattr__(self, "beta", float(self.beta))

    def support(self) -> SupportInterval:
        return SupportInterval(-2.0 * self.beta, 2.0 * self.beta)

    def pieces(self):
        b = self.beta
        return (Piece(-2 * b, 2 * b, 0.5, 0.5, 1.0 / (2 * math.pi * b * b)),)

    def to_json(self) -> dict:
        return {"type": "semicircle", "beta": self.beta}


@dataclass(frozen=True)
class MarchenkoPastur(Measure):
    """Free Poisson law with rate ``beta`` (mean ``beta``, variance ``beta``).

    Atom of mass ``max(1-beta, 0)`` at 0 plus the density
    ``sqrt((l+ - x)(x - l-)) / (2 pi x)`` on [l-, l+], ``l± = (1 ± sqrt(beta))^2``.
    """

    beta: float = 1.0
    kind: str = field(default="marchenko_pastur", init=False, repr=False)

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise MeasureSpecError("Marchenko-Pastur beta must be positive")
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def edges(self) -> tuple[float, float]:
        s = math.sqrt(self.beta)
        return (1.0 - s) ** 2, (1.0 + s) ** 2

    @property
    def atom_mass(self) -> float:
        return max(1.0 - self.beta, 0.0)

    def support(self) -> SupportInterval:
        lo, hi = self.edges
        if self.beta < 1.0:
            lo = 0.0
        return SupportInterval(lo, hi)

    def atom_list(self):
        if self.beta < 1.0:
            return ((0.0, 1.0 - self.beta),)
        return ()

    def pieces(self):
        lo, hi = self.edges
        if self.beta == 1.0:
            return (Piece(0.0, 4.0, -0.5, 0.5, 1.0 / (2 * math.pi)),)
        return (Piece(lo, hi, 0.5, 0.5, 1.0 / (2 * math.pi), inv_x=True, left_pole=lo),)

    def to_json(self) -> dict:
        return {"type": "marchenko_pastur", "beta": self.beta}


def jacobi_constant(a: float, b: float, p: float, q: float) -> float:
    """Normalising constant of ``(x-a)^p (b-x)^q`` on [a, b]."""
    logc = -(p + q + 1) * math.log(b - a) - special.betaln(p + 1, q + 1)
    return math.exp(logc)


@dataclass(frozen=True)
class JacobiDensity(Measure):
    """Density ``c (x-a)^p (b-x)^q`` on [a, b]; ``c`` normalises the mass."""

    a: float = -1.0
    b: float = 1.0
    p: float = 0.5
    q: float = 0.5
    kind: str = field(default="jacobi", init=False, repr=False)

    def __post_init__(self):
        vals = (self.a, self.b, self.p, self.q)
        if not all(math.isfinite(v) for v in vals):
            raise MeasureSpecError("Jacobi parameters must be finite")
        if not self.a < self.b:
            raise MeasureSpecError("Jacobi density needs a < b")
        if not (self.p > -1 and self.q > -1):
            raise MeasureSpecError("Jacobi exponents must exceed -1")
        for name in ("a", "b", "p", "q"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def c(self) -> float:
        return jacobi_constant(self.a, self.b, self.p, self.q)

    def support(self) -> SupportInterval:
        return SupportInterval(self.a, self.b)

    def pieces(self):
        return (Piece(self.a, self.b, self.p, self.q, self.c),)

    def to_json(self) -> dict:
        return {"type": "jacobi", "a": self.a, "b": self.b, "p": self.p, "q": self.q}


# ---------------------------------------------------------------------------
# parsing


def _num(d: dict, key: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise MeasureSpecError(f"missing field {key!r}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MeasureSpecError(f"field {key!r} must be a number")
    return float(v)


def measure_from_json(obj) -> Measure:
    """Build a measure from its JSON description (dict or JSON text)."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise MeasureSpecError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "type" not in obj:
        raise MeasureSpecError("measure spec must be an object with a 'type'")
    t = str(obj["type"]).lower()
    if t in ("semicircle", "sc"):
        return Semicircle(_num(obj, "beta", 1.0))
    if t in ("marchenko_pastur", "mp"):
        return MarchenkoPastur(_num(obj, "beta", 1.0))
    if t == "atomic":
        atoms = obj.get("atoms")
        if not isinstance(atoms, list) or not atoms:
            raise MeasureSpecError("atomic spec needs a non-empty 'atoms' list")
        try:
            pairs = sorted((float(x), float(w)) for x, w in atoms)
        except (TypeError, ValueError):
            raise MeasureSpecError("atoms must be [location, weight] pairs") from None
        return Atomic(tuple(pairs))
    if t == "jacobi":
        m = JacobiDensity(_num(obj, "a"), _num(obj, "b"), _num(obj, "p"), _num(obj, "q"))
        if "c" in obj:
            c = _num(obj, "c")
            if abs(c / m.c - 1.0) > MASS_TOL:
                raise MeasureSpecError(f"Jacobi density with c={c} has mass {c / m.c}, not 1")
        return m
    raise MeasureSpecError(f"unknown measure type {obj['type']!r}")


# ---------------------------------------------------------------------------
# quadrature


@lru_cache(maxsize=None)
def _ref_rule(alpha: float, beta: float, n: int = NODES_PER_PANEL):
    """Gauss-Jacobi rule on [-1, 1] for weight (1-u)^alpha (1+u)^beta."""
    if alpha == 0.0 and beta == 0.0:
        u, w = np.polynomial.legendre.leggauss(n)
    else:
        u, w = special.roots_jacobi(n, alpha, beta)
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


def _level(halfwidth: float, dist: float) -> int:
    """Number of halvings of ``halfwidth`` so the first panel is <= dist."""
    if not (dist < halfwidth):
        return 0
    if dist <= 0.0:
        return MAX_GRADING_LEVEL
    return min(MAX_GRADING_LEVEL, int(math.ceil(math.log2(halfwidth / dist))))


def _half_rule(piece: Piece, level: int, from_left: bool):
    """Nodes/weights for one half of a piece, graded toward one edge.

    Returns (x, w, t) where t is the exact distance of x from that edge.
    """
    L = piece.b - piece.a
    half = 0.5 * L
    expo = piece.p if from_left else piece.q
    s0 = half * 2.0 ** (-level)
    # breakpoints measured from the edge: 0, s0, 2 s0, 4 s0, ..., half
    bps = [0.0, s0]
    while bps[-1] < half * (1 - 1e-12):
        bps.append(min(2 * bps[-1], half))
    ts, ws = [], []
    for k in range(len(bps) - 1):
        lo, hi = bps[k], bps[k + 1]
        hw = 0.5 * (hi - lo)
        if k == 0 and expo != 0.0:
            u, w = _ref_rule(0.0, expo)
            t = hw * (1.0 + u)
            wt = w * hw ** (expo + 1.0)
        else:
            u, w = _ref_rule(0.0, 0.0)
            t = lo + hw * (1.0 + u)
            wt = w * hw * t**expo
        ts.append(t)
        ws.append(wt)
    t = np.concatenate(ts)
    w = np.concatenate(ws)
    other = L - t
    other_expo = piece.q if from_left else piece.p
    w = w * other**other_expo
    x = piece.a + t if from_left else piece.b - t
    w = w * piece.c * piece.smooth(x)
    return x, w


@lru_cache(maxsize=4096)
def _piece_rule(piece: Piece, left_level: int, right_level: int):
    xl, wl = _half_rule(piece, left_level, True)
    xr, wr = _half_rule(piece, right_level, False)
    x = np.concatenate([xl, xr[::-1]])
    w = np.concatenate([wl, wr[::-1]])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _grading(piece: Piece, near: float | None) -> tuple[int, int]:
    half = 0.5 * (piece.b - piece.a)
    dl = piece.left_pole
    dr = math.inf
    if near is not None:
        if near <= piece.a:
            dl = min(dl, piece.a - near)
        elif near >= piece.b:
            dr = near - piece.b
    return _level(half, dl), _level(half, dr)


@lru_cache(maxsize=4096)
def quadrature_rule(m: Measure, near: float | None = None, singular_edge: bool = False):
    """(nodes, weights) representing ``m``; graded toward ``near`` if given.

    With ``singular_edge`` the grading toward supp_- is taken to full depth,
    for integrands with an integrable singularity at the lower edge.
    """
    xs, ws = [], []
    atoms = m.atom_list()
    if atoms:
        xs.append(np.array([a for a, _ in atoms], dtype=float))
        ws.append(np.array([w for _, w in atoms], dtype=float))
    for piece in m.pieces():
        ll, rl = _grading(piece, near)
        if singular_edge:
            ll = MAX_GRADING_LEVEL
        x, w = _piece_rule(piece, ll, rl)
        xs.append(x)
        ws.append(w)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def rule_near(m: Measure, z: float):
    """Rule graded toward z, with z bucketed so the cache stays small."""
    s = m.support()
    if z < s.lower:
        key = s.lower - 2.0 ** math.floor(math.log2(s.lower - z)) if s.lower - z > 0 else s.lower
        return quadrature_rule(m, key)
    if z > s.upper:
        key = s.upper + 2.0 ** math.floor(math.log2(z - s.upper))
        return quadrature_rule(m, key)
    return quadrature_rule(m, None)


def support(m: Measure) -> SupportInterval:
    return m.support()


def integrate(
    m: Measure,
    f: Callable[[np.ndarray], np.ndarray],
    singular_edge: bool = False,
    near: float | None = None,
) -> float:
    """Integral of a vectorised function ``f`` against ``m``.

    ``near`` is a point outside the support where ``f`` is singular; the rule
    is graded toward it.  ``singular_edge`` flags an integrable singularity at
    supp_-.
    """
    if near is not None and not singular_edge:
        x, w = rule_near(m, near)
    else:
        x, w = quadrature_rule(m, None, singular_edge)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonIntegrable("integrand is not finite on the support")
    return float(np.dot(w, vals))


# ---------------------------------------------------------------------------
# moments


def _narayana(k: int, j: int) -> int:
    return math.comb(k, j) * math.comb(k, j - 1) // k


def moment(m: Measure, k: int) -> float:
    """k-th moment, closed form for every built-in family."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if k == 0:
        return 1.0
    if isinstance(m, Atomic):
        return float(sum(w * x**k for x, w in m.atoms))
    if isinstance(m, Semicircle):
        if k % 2:
            return 0.0
        j = k // 2
        return math.comb(2 * j, j) / (j + 1) * m.beta**k
    if isinstance(m, MarchenkoPastur):
        return float(sum(_narayana(k, j) * m.beta**j for j in range(1, k + 1)))
    if isinstance(m, JacobiDensity):
        # x = a + L Y with Y ~ Beta(p+1, q+1)
        L = m.b - m.a
        total = 0.0
        ey = 1.0
        for j in range(k + 1):
            if j > 0:
                ey *= (m.p + j) / (m.p + m.q + 1 + j)
            total += math.comb(k, j) * m.a ** (k - j) * L**j * ey
        return total
    return integrate(m, lambda x: x**k)


def mean(m: Measure) -> float:
    return moment(m, 1)


def variance(m: Measure) -> float:
    m1 = moment(m, 1)
    return moment(m, 2) - m1 * m1


# ---------------------------------------------------------------------------
# distribution function and quantiles (used to build deterministic diagonals)


def _piece_cdf(piece: Piece, x: float) -> float:
    """Mass of the piece on [a, x]."""
    if x <= piece.a:
        return 0.0
    if x >= piece.b:
        x = piece.b
    L = piece.b - piece.a
    n = 64
    if x - piece.a <= 0.5 * L:
        u, w = special.roots_jacobi(n, 0.0, piece.p)
        hw = 0.5 * (x - piece.a)
        t = hw * (1 + u)
        pts = piece.a + t
        vals = (piece.b - pts) ** piece.q * piece.smooth(pts)
        return float(piece.c * hw ** (piece.p + 1) * np.dot(w, vals))
    u, w = special.roots_jacobi(n, piece.q, 0.0)
    hw = 0.5 * (piece.b - x)
    t = hw * (1 - u)
    pts = piece.b - t
    vals = (pts - piece.a) ** piece.p * piece.smooth(pts)
    tail = float(piece.c * hw ** (piece.q + 1) * np.dot(w, vals))
    full = float(np.sum(_piece_rule(piece, 0, 0)[1]))
    return full - tail


def cdf(m: Measure, x: float) -> float:
    total = sum(w for a, w in m.atom_list() if a <= x)
    for piece in m.pieces():
        if not piece.inv_x:
            lo = min(max((x - piece.a) / (piece.b - piece.a), 0.0), 1.0)
            total += special.betainc(piece.p + 1, piece.q + 1, lo) * _piece_mass(piece)
        else:
            total += _piece_cdf(piece, x)
    return float(min(total, 1.0))


def _piece_mass(piece: Piece) -> float:
    if piece.inv_x:
        return float(np.sum(_piece_rule(piece, 0, 0)[1]))
    return piece.c * (piece.b - piece.a) ** (piece.p + piece.q + 1) * math.exp(
        special.betaln(piece.p + 1, piece.q + 1)
    )


def quantiles(m: Measure, n: int) -> np.ndarray:
    """Quantiles of ``m`` at the midpoints (i - 1/2)/n, i = 1..n."""
    u = (np.arange(n) + 0.5) / n
    atoms = m.atom_list()
    pieces = m.pieces()
    if not pieces:
        locs = np.array([a for a, _ in atoms])
        cw = np.cumsum([w for _, w in atoms])
        idx = np.searchsorted(cw, u, side="left")
        return locs[np.minimum(idx, len(locs) - 1)]
    piece = pieces[0]
    if not piece.inv_x and not atoms:
        y = special.betaincinv(piece.p + 1, piece.q + 1, u)
        return piece.a + (piece.b - piece.a) * y
    # Marchenko-Pastur: optional atom at 0 below the continuous part
    out = np.empty(n)
    amass = sum(w for _, w in atoms)
    for i, ui in enumerate(u):
        if ui <= amass:
            out[i] = atoms[0][0]
            continue
        target = ui

        def g(x):
            return cdf(m, x) - target

        out[i] = brentq(g, piece.a, piece.b, xtol=1e-13)
    return out
