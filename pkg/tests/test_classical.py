from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinkinetics.classical import (
    ClassicalDecay,
    constant_gradient_exponent_ratio,
    free_streaming_attenuation,
    no_collision_attenuation,
    regime_ratio,
    torrey_attenuation,
)
from spinkinetics.gas import HELIUM3_MASS, K_B
from spinkinetics.gradient import GradientWaveform, random_waveform
from spinkinetics.kinetic import RelaxationParams, transverse_attenuation

GAMMA = 2.04e8
M = HELIUM3_MASS
T_K = 293.0


def test_schmidt_reference_point():
    T = 2.9e-4
    G = math.sqrt(3 * 0.032e6 / (GAMMA**2 * T**3))
    d = torrey_attenuation(GradientWaveform.constant(G, T), 15.9e-6, GAMMA, T)
    assert d.magnitude[0] == pytest.approx(math.exp(-0.032 * 15.9), rel=1e-12)
    assert d.magnitude[0] == pytest.approx(0.601, abs=1e-3)


def test_torrey_constant_and_zero():
    G, T, D = 0.01, 1e-2, 2e-5
    t = np.linspace(0, T, 6)
    d = torrey_attenuation(GradientWaveform.constant(G, T), D, GAMMA, t)
    np.testing.assert_allclose(d.magnitude, np.exp(-(GAMMA**2) * D * G**2 * t**3 / 3), rtol=1e-13)
    assert np.all(torrey_attenuation(GradientWaveform.zero(T), D, GAMMA, t).magnitude == 1.0)
    with pytest.raises(ValueError):
        torrey_attenuation(GradientWaveform.zero(T), 0.0, GAMMA, t)


def test_no_collision_constant_and_zero():
    G, T = 1e-5, 1e-3
    t = np.linspace(0, T, 6)
    d = no_collision_attenuation(GradientWaveform.constant(G, T), T_K, M, GAMMA, t)
    np.testing.assert_allclose(d.magnitude, np.exp(-(GAMMA**2) * K_B * T_K / M * G**2 * t**4 / 4), rtol=1e-13)
    assert np.all(no_collision_attenuation(GradientWaveform.zero(T), T_K, M, GAMMA, t).magnitude == 1.0)


def test_free_streaming_is_half_exponent_for_constant_gradient():
    w = GradientWaveform.constant(1e-5, 1e-3)
    t = np.linspace(0, 1e-3, 5)
    a = no_collision_attenuation(w, T_K, M, GAMMA, t)
    b = free_streaming_attenuation(w, T_K, M, GAMMA, t)
    np.testing.assert_allclose(b.exponent, a.exponent / 2, rtol=1e-12)


def test_exponent_ratio_three_quarters_alpha_T():
    alpha, T = 3.5e10, 2.9e-4
    w = GradientWaveform.constant(0.1, T)
    nc = no_collision_attenuation(w, T_K, M, GAMMA, T).exponent[0]
    tor = torrey_attenuation(w, K_B * T_K / (M * alpha), GAMMA, T).exponent[0]
    assert nc / tor == pytest.approx(0.75 * alpha * T, rel=1e-12)
    assert constant_gradient_exponent_ratio(alpha, T) == pytest.approx(0.75 * alpha * T)


def test_regime_ratio_examples():
    r = regime_ratio(3.5e10, 2.9e-4)
    assert 10 ** 6.5 < r < 10 ** 7.5
    assert regime_ratio(3.5e10, 0.0) == 0.0
    assert regime_ratio(3.5e10, 5.8e-4) == 2 * r
    with pytest.raises(ValueError):
        regime_ratio(-1.0, 1.0)
    d = torrey_attenuation(GradientWaveform.constant(0.1, 2.9e-4), 1e-5, GAMMA, 1e-4, alpha=3.5e10)
    assert d.regime_ratio == pytest.approx(r)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), target=st.floats(1e-5, 0.1))
def test_second_order_consistency(seed, target):
    rng = np.random.default_rng(seed)
    w = random_waveform(rng, 1e-3)
    D = 2e-5
    raw = GAMMA**2 * D * w.int_F2(1e-3)
    w = w.scaled(math.sqrt(target / raw))
    t = np.linspace(0, 1e-3, 21)
    cls = torrey_attenuation(w, D, GAMMA, t)
    kin = transverse_attenuation(w, RelaxationParams(K_B * T_K / (M * D), D), GAMMA, t)
    gap = np.abs((1 - cls.magnitude) - (1 - kin.attenuation))
    assert np.all(gap <= cls.exponent**2 / 2 + 4 * np.finfo(float).eps)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_monotone_decay(seed):
    rng = np.random.default_rng(seed)
    w = random_waveform(rng, 1e-3, G_scale=1e-4)
    t = np.linspace(0, 1e-3, 200)
    assert np.all(np.diff(torrey_attenuation(w, 2e-5, GAMMA, t).magnitude) <= 0)
    # the collisionless form is monotone while int F grows, i.e. for G >= 0
    pos = GradientWaveform(tuple((tt, abs(g)) for tt, g in w.breakpoints))
    assert np.all(np.diff(no_collision_attenuation(pos, T_K, M, GAMMA, t).magnitude) <= 0)


def test_magnitude_and_phase_ranges():
    w = random_waveform(np.random.default_rng(1), 1e-3, G_scale=1e-4)
    t = np.linspace(0, 1e-3, 50)
    for d in (torrey_attenuation(w, 2e-5, GAMMA, t, x=1e-3),
              no_collision_attenuation(w, T_K, M, GAMMA, t, x=1e-3)):
        assert np.all((d.magnitude >= 0) & (d.magnitude <= 1))
        np.testing.assert_allclose(np.abs(d.phase), 1.0, atol=1e-12)


def test_no_longitudinal_channel():
    names = {f.name for f in dataclasses.fields(ClassicalDecay)}
    assert names == {"t", "magnitude", "phase", "exponent", "regime_ratio"}
