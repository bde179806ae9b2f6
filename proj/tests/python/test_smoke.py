"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import seqdecon as sd


def test_spectral_roundtrip():
    basis = sd.SpectralBasis.one_d(16)
    y = np.arange(16, dtype=float)
    s = sd.to_spectral(basis, y)
    assert np.linalg.norm(s) == pytest.approx(np.linalg.norm(y), rel=1e-12)
    back, resid = sd.from_spectral(basis, s)
    assert np.allclose(back, y, atol=1e-12)
    assert resid < 1e-12


def test_diagonalize_matches_numpy_fft():
    basis = sd.SpectralBasis.one_d(8)
    taps = np.array([0.5, 0.25, 0, 0, 0, 0, 0, 0.25])
    d = sd.diagonalize(basis, taps)
    assert np.allclose(d, np.fft.fft(taps), atol=1e-12)


def test_streaming_estimate_recovers_noiseless_identity():
    p = 16
    basis = sd.SpectralBasis.one_d(p)
    rng = np.random.default_rng(0)
    y = rng.standard_normal(p)
    state = sd.SufStat(basis)
    state.update(np.ones(p, dtype=complex), sd.to_spectral(basis, y))
    theta, lam, diag = sd.estimate(state, "main", 0.0)
    assert np.allclose(theta, y, atol=1e-10)
    assert diag["zeroed_components"] == 0


def test_suffstat_json_roundtrip():
    basis = sd.SpectralBasis.one_d(4)
    state = sd.SufStat(basis)
    state.update(
        np.array([1 + 1j, 2, 0.5j, -1.0]), np.array([0.5, -1j, 2 + 2j, 0.25])
    )
    text = state.to_json()
    back = sd.SufStat.from_json(text)
    assert back.n == 1
    assert back.to_json() == text


def test_weight_families():
    delta = np.array([1.0, 3.0])
    assert np.allclose(sd.weights_tp(delta, 1.0), [0.5, 0.75])
    w, clamped = sd.weights_li(np.array([2.0]), 3, 0.25)
    assert w[0] == pytest.approx(0.875)
    assert not clamped
    b = np.array([2.0 + 0j])
    assert sd.weights_soft(b, np.array([1.0]), 1.0)[0] == pytest.approx(0.75)


def test_oracle_risks_ordering():
    rng = np.random.default_rng(1)
    beta = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    ds = [rng.standard_normal(8) + 1j * rng.standard_normal(8) for _ in range(4)]
    r1, r2, c1, c2 = sd.oracle_risks(beta, ds, 0.5)
    assert r1 <= r2
    assert r1 == pytest.approx(float(np.sum(c1)))


def test_simulation_determinism():
    a = sd.run_experiment(p=32, n_grid=[4, 8], reps=3, seed=11, signals=["peaked"])
    b = sd.run_experiment(p=32, n_grid=[4, 8], reps=3, seed=11, signals=["peaked"])
    assert a == b
    c = sd.run_experiment(p=32, n_grid=[4, 8], reps=3, seed=12, signals=["peaked"])
    assert a != c
    assert {row["estimator"] for row in a} == {"main", "ridge-avg"}


def test_noise_estimators():
    acc = sd.ConsistentVariance(4)
    acc.update(np.array([1.0, 2.0, 3.0, 4.0]))
    acc.update(np.array([1.0, 2.0, 3.0 + 2.0, 4.0]))
    value, clamped = acc.estimate()
    assert value == pytest.approx((2.0**2) / (4 * 4))
    assert not clamped
    assert sd.epsilon_tail(np.array([0j, 0j, 3.0 + 0j, 4.0 + 0j]), 2) == pytest.approx(12.5)


def test_signals():
    smooth = sd.gen_theta_smooth(64)
    peaked = sd.gen_theta_peaked(64)
    assert smooth.shape == (64,)
    assert np.linalg.norm(peaked) > 0
    s = sd.to_spectral(sd.SpectralBasis.one_d(64), smooth)
    f = np.minimum(np.arange(64), 64 - np.arange(64))
    assert np.all(np.abs(s[f > 16]) <= 1e-13 * np.abs(s).max())


def test_rng_reproducibility():
    r1, r2 = sd.Rng(5), sd.Rng(5)
    assert [r1.uniform() for _ in range(5)] == [r2.uniform() for _ in range(5)]
    assert sd.Rng.derive(1, 2) != sd.Rng.derive(1, 3)
