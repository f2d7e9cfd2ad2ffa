"""Random-matrix oracle for free additive convolutions.

A GOE or Wishart matrix ``A`` plus a deterministic diagonal ``D`` of
nu-quantiles has a spectrum that converges to mu [+] nu.  Each trial draws
from a Philox stream keyed by ``(seed, trial)``, so trials are independent
of each other and of the order (or thread) in which they run.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, ResourceLimit, ZInsideSpectrum
from .measures import MarchenkoPastur, Measure, Semicircle, moment, quantiles

DEFAULT_MAX_N = 4096
MIN_N = 16


def max_n() -> int:
    raw = os.environ.get("FPCONV_MAX_N", "")
    try:
        return int(raw) if raw.strip() else DEFAULT_MAX_N
    except ValueError:
        raise ConfigError(f"FPCONV_MAX_N={raw!r} is not an integer") from None


@dataclass(frozen=True)
class EnsembleSpec:
    """``mu_kind`` is "GOE" (semicircle) or "Wishart" (Marchenko-Pastur)."""

    mu_kind: str
    beta: float
    nu: Measure
    n: int
    trials: int = 1
    seed: int = 0

    def __post_init__(self):
        kind = {"goe": "GOE", "wishart": "Wishart"}.get(str(self.mu_kind).lower())
        if kind is None:
            raise ConfigError(f"unknown ensemble {self.mu_kind!r}")
        object.__setattr__(self, "mu_kind", kind)
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ConfigError("ensemble beta must be positive")
        if self.n < MIN_N:
            raise ResourceLimit(f"n={self.n} is below the minimum {MIN_N}")
        if self.n > max_n():
            raise ResourceLimit(f"n={self.n} exceeds the limit {max_n()} (FPCONV_MAX_N)")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def wishart_m(self) -> int:
        return max(1, int(round(self.beta * self.n)))

    @property
    def achieved_beta(self) -> float:
        return self.wishart_m / self.n if self.mu_kind == "Wishart" else self.beta

    def mu_measure(self) -> Measure:
        """Limit law of A, using the achieved aspect ratio for Wishart."""
        if self.mu_kind == "GOE":
            return Semicircle(self.beta)
        return MarchenkoPastur(self.achieved_beta)


@dataclass(frozen=True)
class SpectrumSample:
    eigenvalues: np.ndarray
    trial_index: int
    seed_used: int

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def min_eig(self) -> float:
        return float(self.eigenvalues[0])


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


def _matrix(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    n = spec.n
    if spec.mu_kind == "GOE":
        x = rng.standard_normal((n, n))
        a = spec.beta * (x + x.T) / math.sqrt(2.0 * n)
    else:
        x = rng.standard_normal((n, spec.wishart_m))
        a = x @ x.T / n
    a[np.diag_indices(n)] += quantiles(spec.nu, n)
    return a


def sample_spectrum(spec: EnsembleSpec, trial: int) -> SpectrumSample:
    """Sorted eigenvalues of A + diag(nu quantiles) for one trial."""
    if not 0 <= trial < spec.trials:
        raise ConfigError(f"trial {trial} not in [0, {spec.trials})")
    a = _matrix(spec, trial_rng(spec.seed, trial))
    ev = np.sort(_kernels.sym_eigvals(a))
    return SpectrumSample(ev, trial, spec.seed)


def empirical_potential(s: SpectrumSample, z: float) -> float:
    """(1/n) sum log(lambda_i - z) for z below the spectrum."""
    lo = s.min_eig
    if not z < lo:
        raise ZInsideSpectrum(f"z={z!r} is not below the smallest eigenvalue {lo!r}")
    c = lo - z
    ones = np.full(s.n, 1.0 / s.n)
    return math.log(c) + _kernels.log_sum(s.eigenvalues, ones, lo, c)


def _spectra(spec: EnsembleSpec, workers: int = 1) -> list[SpectrumSample]:
    idx = range(spec.trials)
    if workers <= 1:
        return [sample_spectrum(spec, t) for t in idx]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: sample_spectrum(spec, t), idx))


def empirical_edge(spec: EnsembleSpec, workers: int = 1) -> float:
    """Mean over trials of the smallest eigenvalue."""
    return float(np.mean([s.min_eig for s in _spectra(spec, workers)]))


@dataclass
class EnsembleRun:
    spec: EnsembleSpec
    z: float | None
    min_eigs: np.ndarray
    potentials: np.ndarray | None
    predicted_edge: float
    predicted_potential: float | None

    @property
    def empirical_edge(self) -> float:
        return float(np.mean(self.min_eigs))

    @property
    def empirical_potential(self) -> float | None:
        return None if self.potentials is None else float(np.mean(self.potentials))

    def summary(self) -> dict:
        edge_err = abs(self.empirical_edge - self.predicted_edge)
        out = {
            "n": self.spec.n,
            "trials": self.spec.trials,
            "seed": self.spec.seed,
            "ensemble": self.spec.mu_kind,
            "beta": self.spec.achieved_beta,
            "z": self.z,
            "edge_empirical": self.empirical_edge,
            "edge_predicted": self.predicted_edge,
            "edge_abs_error": edge_err,
        }
        if self.potentials is not None:
            emp = self.empirical_potential
            out.update(
                empirical_mean=emp,
                predicted=self.predicted_potential,
                abs_error=abs(emp - self.predicted_potential),
            )
        else:
            out.update(empirical_mean=self.empirical_edge, predicted=self.predicted_edge, abs_error=edge_err)
        return out

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "min_eig", "potential_at_z"])
        for i, m in enumerate(self.min_eigs):
            p = "" if self.potentials is None else format(float(self.potentials[i]), ".17g")
            w.writerow([i, format(float(m), ".17g"), p])
        return buf.getvalue()


def run_ensemble(spec: EnsembleSpec, z: float | None = None, workers: int = 1) -> EnsembleRun:
    """Sample all trials; compare the edge (and U at z) with the predictions."""
    from .freeconv import endpoint_summary
    from .potential import u_variational

    samples = _spectra(spec, workers)
    mins = np.array([s.min_eig for s in samples])
    mu = spec.mu_measure()
    pred_edge = endpoint_summary(mu, spec.nu).z_star
    pots = None
    pred_u = None
    if z is not None:
        pots = np.array([empirical_potential(s, z) for s in samples])
        pred_u = u_variational(mu, spec.nu, z).u
    return EnsembleRun(spec, z, mins, pots, pred_edge, pred_u)


def trace_mean_bound(spec: EnsembleSpec) -> float:
    """Loose bracket 5/sqrt(n) for |mean eigenvalue - E[A] - mean(nu)|."""
    return 5.0 / math.sqrt(spec.n)


def expected_mean(spec: EnsembleSpec) -> float:
    shift = 0.0 if spec.mu_kind == "GOE" else spec.wishart_m / spec.n
    return shift + moment(spec.nu, 1)
