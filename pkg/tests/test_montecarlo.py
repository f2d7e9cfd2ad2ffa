from __future__ import annotations

import math

import numpy as np
import pytest

from fpconv.errors import ConfigError, ResourceLimit, ZInsideSpectrum
from fpconv.freeconv import endpoint_summary
from fpconv.measures import Semicircle, delta, moment, two_atom
from fpconv.montecarlo import (
    EnsembleSpec,
    empirical_edge,
    empirical_potential,
    expected_mean,
    run_ensemble,
    sample_spectrum,
)
from fpconv.potential import u_direct


def test_small_goe_edge_bracket():
    spec = EnsembleSpec("GOE", 1.0, delta(0.0), 16, 100, 7)
    for t in range(100):
        assert -3.0 < sample_spectrum(spec, t).min_eig < 0.0


def test_determinism_and_independence_of_order():
    spec = EnsembleSpec("GOE", 1.0, two_atom(-1, 1), 64, 4, 123)
    a = sample_spectrum(spec, 2).eigenvalues
    b = sample_spectrum(spec, 2).eigenvalues
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_spectrum(spec, 1).eigenvalues)
    r1 = run_ensemble(spec, -4.0, workers=1)
    r2 = run_ensemble(spec, -4.0, workers=3)
    assert r1.csv_text() == r2.csv_text()


def test_trace_mean():
    for kind in ("GOE", "Wishart"):
        spec = EnsembleSpec(kind, 0.5, two_atom(-1.0, 2.0, 0.3), 200, 3, 1)
        for t in range(3):
            ev = sample_spectrum(spec, t).eigenvalues
            assert abs(ev.mean() - expected_mean(spec)) <= 5 / math.sqrt(spec.n)
    assert moment(two_atom(-1.0, 2.0, 0.3), 1) == pytest.approx(1.1)


def test_potential_law_of_large_numbers():
    spec = EnsembleSpec("GOE", 1.0, delta(0.0), 1000, 1, 11)
    s = sample_spectrum(spec, 0)
    assert empirical_potential(s, -3.0) == pytest.approx(u_direct(Semicircle(1.0), -3.0), abs=0.05)
    assert empirical_potential(s, -1e7) - math.log(1e7) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(ZInsideSpectrum):
        empirical_potential(s, 0.0)


def test_edges():
    spec = EnsembleSpec("GOE", 1.0, two_atom(-1.0, 1.0), 400, 4, 5)
    zs = endpoint_summary(Semicircle(1.0), two_atom(-1.0, 1.0)).z_star
    assert empirical_edge(spec) == pytest.approx(zs, abs=0.15)
    w = EnsembleSpec("Wishart", 1.0, delta(0.0), 200, 2, 5)
    assert 0.0 <= empirical_edge(w) < 1e-2


def test_spec_validation(monkeypatch):
    with pytest.raises(ResourceLimit):
        EnsembleSpec("GOE", 1.0, delta(0.0), 1, 1, 0)
    with pytest.raises(ResourceLimit):
        EnsembleSpec("GOE", 1.0, delta(0.0), 5000, 1, 0)
    monkeypatch.setenv("FPCONV_MAX_N", "32")
    with pytest.raises(ResourceLimit):
        EnsembleSpec("GOE", 1.0, delta(0.0), 64, 1, 0)
    with pytest.raises(ConfigError):
        EnsembleSpec("GUE", 1.0, delta(0.0), 16, 1, 0)
    with pytest.raises(ConfigError):
        EnsembleSpec("GOE", 1.0, delta(0.0), 16, 0, 0)
    spec = EnsembleSpec("GOE", 1.0, delta(0.0), 16, 2, 0)
    with pytest.raises(ConfigError):
        sample_spectrum(spec, 2)


def test_summary_fields():
    spec = EnsembleSpec("Wishart", 0.5, delta(0.0), 64, 2, 3)
    s = run_ensemble(spec, -1.0).summary()
    for key in ("n", "trials", "z", "empirical_mean", "predicted", "abs_error"):
        assert key in s
    assert spec.achieved_beta == 0.5
