"""Real R-transform ``R(t) = G^<-1>(-t) - 1/t``.

:class:`RTransformReal` carries the natural domain ``dhat = (-g_star, -g_plus)``
and, when a closed form is known, a larger domain ``d_extended`` on which the
formula continues analytically (semicircle: the whole line; Marchenko-Pastur:
``(-inf, 1)``; a single atom: the whole line).  Without a closed form the
numeric evaluator works on ``dhat`` only.

Besides measures, an R-transform may be given directly as a polynomial in
``t`` (free cumulants); such objects have no measure attached and live on the
whole real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateMu, OutOfDomain
from .measures import Atomic, MarchenkoPastur, Measure, Semicircle, moment
from .stieltjes import INF, edge_data, g_deriv, g_inverse_any, g_value, resolvent_variance

SERIES_CUTOFF = 1e-3
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def free_cumulants(moments: list[float]) -> list[float]:
    """Free cumulants k_1..k_n from moments m_0..m_n (m_0 = 1).

    Uses ``M(x) = C(x (1 + M(x)))`` for the generating series
    ``M = sum_{n>=1} m_n x^n`` and ``C = sum_{n>=1} k_n x^n``.
    """
    n = len(moments) - 1
    M = np.zeros(n + 1)
    M[1:] = moments[1:]
    base = np.zeros(n + 1)  # x (1 + M(x)) truncated
    base[1] = 1.0
    base[2:] = M[1:n]
    kappa = [0.0] * (n + 1)
    powers = [None] * (n + 1)
    cur = np.zeros(n + 1)
    cur[0] = 1.0
    for k in range(1, n + 1):
        cur = np.convolve(cur, base)[: n + 1]
        powers[k] = cur
    for j in range(1, n + 1):
        acc = sum(kappa[k] * powers[k][j] for k in range(1, j))
        kappa[j] = M[j] - acc  # powers[j][j] == 1
    return kappa[1:]


@dataclass(frozen=True)
class RTransformReal:
    """Real R-transform of a measure, or of a free-cumulant polynomial."""

    measure: Measure | None
    dhat: tuple[float, float] | None
    d_extended: tuple[float, float] | None
    coeffs: tuple[float, ...] | None = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_polynomial(cls, coeffs) -> "RTransformReal":
        """R(t) = sum_k coeffs[k] t^k (coeffs[k] is the (k+1)-th free cumulant)."""
        c = tuple(float(v) for v in coeffs)
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        if len(c) < 2 or all(v == 0.0 for v in c[1:]):
            raise DegenerateMu("R-transform polynomial is constant")
        return cls(None, None, (-INF, INF), c)

    # -- domain ------------------------------------------------------------------

    @property
    def domain(self) -> tuple[float, float]:
        return self.d_extended if self.d_extended is not None else self.dhat

    @property
    def closed_form(self) -> bool:
        return self.coeffs is not None or self._atom is not None or isinstance(
            self.measure, (Semicircle, MarchenkoPastur)
        )

    @property
    def _atom(self) -> float | None:
        m = self.measure
        if isinstance(m, Atomic) and len(m.atoms) == 1:
            return m.atoms[0][0]
        return None

    @property
    def is_degenerate(self) -> bool:
        return self._atom is not None

    def in_domain(self, t: float) -> bool:
        lo, hi = self.domain
        return lo < t < hi

    def _check(self, t: float) -> None:
        if not self.in_domain(t):
            raise OutOfDomain(f"t={t!r} outside the R-transform domain {self.domain}")

    # -- series ---------------------------------------------------------------

    @property
    def cumulants(self) -> tuple[float, ...]:
        return _cumulants(self.measure)

    def _series(self, t: float, order: int = 0) -> float:
        k = self.cumulants  # R(t) = sum_n k[n] t^n
        if order == 0:
            return float(sum(kn * t**n for n, kn in enumerate(k)))
        return float(sum(n * kn * t ** (n - 1) for n, kn in enumerate(k) if n >= 1))

    @staticmethod
    def _blend_weight(t: float) -> float:
        a = abs(t)
        lo = 0.5 * SERIES_CUTOFF
        if a < lo:
            return 0.0
        if a >= SERIES_CUTOFF:
            return 1.0
        return (a - lo) / (SERIES_CUTOFF - lo)

    # -- evaluation -----------------------------------------------------------

    def value(self, t: float) -> float:
        self._check(t)
        if self.coeffs is not None:
            return float(np.polyval(self.coeffs[::-1], t))
        a = self._atom
        if a is not None:
            return a
        m = self.measure
        if isinstance(m, Semicircle):
            return m.beta**2 * t
        if isinstance(m, MarchenkoPastur):
            return m.beta / (1.0 - t)
        w = self._blend_weight(t)
        direct = 0.0
        if w > 0.0:
            direct = g_inverse_any(m, -t) - 1.0 / t
        if w == 1.0:
            return direct
        return (1.0 - w) * self._series(t) + w * direct

    def deriv(self, t: float) -> float:
        self._check(t)
        if self.coeffs is not None:
            c = self.coeffs
            return float(sum(k * c[k] * t ** (k - 1) for k in range(1, len(c))))
        if self._atom is not None:
            return 0.0
        m = self.measure
        if isinstance(m, Semicircle):
            return m.beta**2
        if isinstance(m, MarchenkoPastur):
            return m.beta / (1.0 - t) ** 2
        w = self._blend_weight(t)
        direct = 0.0
        if w > 0.0:
            z = g_inverse_any(m, -t)
            g = g_value(m, z)
            # 1/t^2 - 1/G'(z) = Var[1/(x-z)] / (G^2 G'), free of cancellation
            direct = resolvent_variance(m, z) / (g * g * g_deriv(m, z, 1))
        if w == 1.0:
            return direct
        return (1.0 - w) * self._series(t, 1) + w * direct

    def first_term(self, g: float) -> float:
        """int_0^g s R'(-s) ds."""
        if g == 0.0:
            return 0.0
        self._check(-g)
        if self.coeffs is not None:
            c = self.coeffs
            return float(sum(k * c[k] * (-1) ** (k - 1) * g ** (k + 1) / (k + 1) for k in range(1, len(c))))
        if self._atom is not None:
            return 0.0
        m = self.measure
        if isinstance(m, Semicircle):
            return 0.5 * m.beta**2 * g * g
        if isinstance(m, MarchenkoPastur):
            return m.beta * (math.log1p(g) - g / (1.0 + g))
        s = 0.5 * g * (_GL_NODES + 1.0)
        vals = np.array([si * self.deriv(-si) for si in s])
        return float(0.5 * g * np.dot(_GL_WEIGHTS, vals))

    def limit_neg_inf(self) -> float | None:
        """lim R(t) as t -> -inf when -inf bounds the domain, else None."""
        lo, _ = self.domain
        if lo != -INF:
            return None
        if self.coeffs is not None:
            c = self.coeffs
            lead = c[-1] * (-1) ** (len(c) - 1)
            return INF if lead > 0 else -INF
        if self._atom is not None:
            return self._atom
        m = self.measure
        if isinstance(m, Semicircle):
            return -INF
        if isinstance(m, MarchenkoPastur):
            return 0.0
        # G^-1(g) - 1/(-t) -> supp_- as g = -t -> inf
        return m.support().lower

    def rprime_zeros(self, g_lo: float, g_hi: float) -> list[float]:
        """Zeros of g -> R'(-g) in (g_lo, g_hi)."""
        if self.coeffs is None:
            return []  # R' > 0 on dhat; closed forms have no zeros
        c = self.coeffs
        # R'(-g) = sum_k k c_k (-g)^(k-1) as a polynomial in g
        d = [k * c[k] * (-1) ** (k - 1) for k in range(1, len(c))]
        if len(d) <= 1:
            return []
        roots = np.roots(d[::-1])
        out = sorted(float(r.real) for r in roots if abs(r.imag) < 1e-12 * max(1.0, abs(r)))
        return [r for r in out if g_lo < r < g_hi]

    def to_json(self) -> dict:
        if self.coeffs is not None:
            return {"type": "r_polynomial", "coeffs": list(self.coeffs)}
        return self.measure.to_json()


@lru_cache(maxsize=None)
def _cumulants(m: Measure) -> tuple[float, ...]:
    mom = [moment(m, k) for k in range(9)]
    k = free_cumulants(mom)
    return tuple(k)  # R(t) = sum_n k[n] t^n, k[0] = mean


@lru_cache(maxsize=None)
def r_transform(m: Measure) -> RTransformReal:
    ed = edge_data(m)
    dhat = (-ed.g_star, -ed.g_plus)
    ext = None
    if isinstance(m, Semicircle) or (isinstance(m, Atomic) and len(m.atoms) == 1):
        ext = (-INF, INF)
    elif isinstance(m, MarchenkoPastur):
        ext = (-INF, 1.0)
    return RTransformReal(m, dhat, ext)


def as_rtransform(mu) -> RTransformReal:
    if isinstance(mu, RTransformReal):
        return mu
    if isinstance(mu, Measure):
        return r_transform(mu)
    raise TypeError(f"expected a Measure or RTransformReal, got {type(mu).__name__}")


def r_value(rt: RTransformReal, t: float) -> float:
    return rt.value(t)


def r_deriv(rt: RTransformReal, t: float) -> float:
    return rt.deriv(t)


def d_plus_contains(rt: RTransformReal, t: float) -> bool:
    if not rt.in_domain(t):
        return False
    return rt.deriv(t) > 0.0
