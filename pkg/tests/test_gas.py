from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from spinkinetics.gas import (
    AMU,
    ATM,
    HBAR,
    HELIUM3_MASS,
    K_B,
    THRESHOLDS,
    GasConditions,
    derive,
    diagnostics,
    maxwell_boltzmann,
    schmidt_conditions,
)

F_PEAK = 3.5e-5


def test_number_density_by_hand():
    # 7 atm = 709275 Pa; k * 293 K = 4.045302e-21 J
    n_hand = 709275.0 / (1.380649e-23 * 293.0)
    assert derive(schmidt_conditions()).number_density == pytest.approx(n_hand, rel=1e-12)
    assert n_hand == pytest.approx(1.75e26, rel=0.01)


def test_a_over_d(conditions, derived):
    a_over_d = conditions.hard_core_radius / derived.mean_spacing
    assert a_over_d == pytest.approx(0.13, rel=0.05)


def test_doubling_temperature_halves_density(conditions):
    hot = GasConditions(2 * conditions.temperature, conditions.pressure, conditions.particle_mass,
                        conditions.gyromagnetic_ratio, conditions.hard_core_radius)
    assert derive(hot).number_density == 0.5 * derive(conditions).number_density


@given(scale=st.floats(0.1, 10.0), p_atm=st.floats(0.1, 100.0))
def test_density_scales_with_pressure(scale, p_atm):
    c1 = GasConditions(293.0 * scale, p_atm * ATM, HELIUM3_MASS, 2.04e8, 2.4e-10)
    c2 = GasConditions(293.0 * scale, 2 * p_atm * ATM, HELIUM3_MASS, 2.04e8, 2.4e-10)
    d1, d2 = derive(c1), derive(c2)
    assert d2.number_density == pytest.approx(2 * d1.number_density, rel=1e-15)
    assert d1.mean_spacing * d1.number_density ** (1 / 3) == pytest.approx(1.0, rel=1e-15)


def test_derived_conventions(conditions, derived):
    M, kT = conditions.particle_mass, K_B * conditions.temperature
    assert derived.reduced_mass == M / 2
    assert derived.mean_momentum == pytest.approx(math.sqrt(8 * M * kT / math.pi), rel=1e-14)
    assert derived.mean_relative_momentum == pytest.approx(math.sqrt(4 * M * kT / math.pi), rel=1e-14)
    assert derived.mean_wavelength == pytest.approx(HBAR / derived.mean_momentum, rel=1e-15)
    assert derived.beta_M == pytest.approx(1 / (2 * M * kT), rel=1e-15)
    for name in ("number_density", "mean_spacing", "beta_M", "mean_momentum", "mean_relative_momentum",
                 "mean_wavelength", "reduced_mass", "degeneracy"):
        assert getattr(derived, name) > 0


@settings(max_examples=15, deadline=None)
@given(m_fac=st.floats(0.316, 3.16), t_fac=st.floats(0.316, 3.16))
def test_maxwell_boltzmann_normalised(m_fac, t_fac):
    M, T = HELIUM3_MASS * m_fac, 293.0 * t_fac
    scale = math.sqrt(M * K_B * T)
    val, _ = integrate.quad(lambda p: 4 * math.pi * p * p * maxwell_boltzmann(p, M, T), 0, 40 * scale,
                            epsabs=0, epsrel=1e-12, points=[scale], limit=200)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_maxwell_boltzmann_origin_and_second_moment(conditions):
    M, T = conditions.particle_mass, conditions.temperature
    beta = 1 / (2 * M * K_B * T)
    assert maxwell_boltzmann(0.0, M, T) == pytest.approx((beta / math.pi) ** 1.5, rel=1e-15)
    scale = math.sqrt(M * K_B * T)
    p2, _ = integrate.quad(lambda p: 4 * math.pi * p**4 * maxwell_boltzmann(p, M, T), 0, 40 * scale,
                           epsabs=0, epsrel=1e-12, points=[scale], limit=200)
    assert p2 == pytest.approx(3 * M * K_B * T, rel=1e-9)


def test_maxwell_boltzmann_rejects_bad_input():
    with pytest.raises(ValueError):
        maxwell_boltzmann(-1.0, HELIUM3_MASS, 293.0)
    with pytest.raises(ValueError):
        maxwell_boltzmann(1.0, HELIUM3_MASS, 0.0)


def test_gradient_momentum_ratio(conditions):
    rep = diagnostics(conditions, F_PEAK)
    assert rep.gradient_momentum_ratio == pytest.approx(9.5e-8, rel=0.15)


def test_ka_over_hbar(conditions):
    assert diagnostics(conditions, F_PEAK).ka_over_hbar == pytest.approx(12.5, rel=0.10)


def test_zero_gradient_ratio(conditions):
    assert diagnostics(conditions, 0.0).gradient_momentum_ratio == 0.0


def test_flags_carry_threshold_and_value(conditions):
    rep = diagnostics(conditions, F_PEAK)
    assert rep.all_passed
    by_name = {f.name: f for f in rep.validity_flags}
    assert set(by_name) == set(THRESHOLDS)
    for name, flag in by_name.items():
        assert flag.threshold == THRESHOLDS[name]
        assert flag.value == getattr(rep, name)


def test_degeneracy_negligible(conditions):
    assert diagnostics(conditions, F_PEAK).degeneracy < 1e-2


def test_failing_flags_reported_not_raised():
    cold = GasConditions(0.5, 7 * ATM, HELIUM3_MASS, 2.04e8, 2.4e-10)
    rep = diagnostics(cold, 1.0)
    failed = {f.name for f in rep.validity_flags if not f.passed}
    assert {"ka_over_hbar", "degeneracy", "a_over_d"} <= failed
    assert not rep.all_passed


def test_negative_peak_rejected(conditions):
    with pytest.raises(ValueError):
        diagnostics(conditions, -1.0)


@pytest.mark.parametrize(
    "kw",
    [dict(temperature=0.0), dict(pressure=-1.0), dict(particle_mass=0.0), dict(hard_core_radius=0.0),
     dict(statistics_sign=0), dict(temperature=math.nan)],
)
def test_invalid_conditions(kw):
    base = dict(temperature=293.0, pressure=ATM, particle_mass=HELIUM3_MASS,
                gyromagnetic_ratio=2.04e8, hard_core_radius=2.4e-10)
    base.update(kw)
    with pytest.raises(ValueError):
        GasConditions(**base)


def test_json_units_and_round_trip(conditions):
    d = conditions.to_json_dict()
    assert d["pressure_atm"] == pytest.approx(7.0)
    assert d["gyromagnetic_ratio_MHz_per_T"] == pytest.approx(204.0)
    assert d["hard_core_radius_A"] == pytest.approx(2.4)
    back = GasConditions.from_json_dict(d)
    assert back.gyromagnetic_ratio == pytest.approx(2.04e8, rel=1e-15)
    assert back.particle_mass == pytest.approx(3.0160293 * AMU, rel=1e-15)
    assert derive(back).number_density == pytest.approx(derive(conditions).number_density, rel=1e-14)


def test_json_rejects_unknown_and_missing():
    good = schmidt_conditions().to_json_dict()
    with pytest.raises(ValueError, match="unknown"):
        GasConditions.from_json_dict({**good, "colour": "blue"})
    del good["temperature_K"]
    with pytest.raises(ValueError, match="missing"):
        GasConditions.from_json_dict(good)


def test_kT_property(derived):
    assert derived.kT == K_B * derived.temperature
    assert np.isfinite(derived.degeneracy)
