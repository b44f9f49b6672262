"""Acceptance checks shared by ``spinkinetics validate`` and the test suite.

Each check returns a :class:`CheckResult` holding the measured value, the
target and the tolerance.  Informational entries are reported but never
counted toward the overall verdict.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np

from .classical import (
    constant_gradient_exponent_ratio,
    free_streaming_attenuation,
    no_collision_attenuation,
    torrey_attenuation,
)
from .gas import HBAR, K_B, GasConditions, derive, diagnostics, schmidt_conditions
from .gradient import GradientWaveform, random_waveform
from .kinetic import PolarizationState, analytic_h1_plus, relaxation, solve_h1, transverse_attenuation
from .montecarlo import MCConfig, simulate, velocity_autocorrelation
from .scattering import (
    ValidityWarning,
    HardSphereModel,
    angular_xsecs,
    geometric_transport,
    thermal_integrals,
)

__all__ = ["CheckResult", "AcceptanceContext", "CHECKS", "run_acceptance", "format_line", "summary"]

# reference numbers quoted for the helium-3 experiment
REF_A_OVER_D = 0.13
REF_GRADIENT_RATIO = 9.5e-8
REF_KA = 12.5
REF_ALPHA = 3.5e10
REF_D = 23.1e-6
REF_F_PEAK = 3.5e-5
REF_GAMMA2_INTF2 = 0.032e6  # s / m^2
REF_D_EXP = 15.9e-6
REF_SEQUENCE = 2.9e-4  # s


@dataclass(frozen=True)
class CheckResult:
    id: str
    description: str
    passed: bool
    value: float
    target: float
    tolerance: str
    detail: str = ""
    informational: bool = False
    seconds: float = 0.0

    def to_json_dict(self) -> dict:
        return asdict(self)


def format_line(r: CheckResult) -> str:
    tag = "INFO" if r.informational else ("PASS" if r.passed else "FAIL")
    line = f"[{tag}] {r.id}: {r.description}: value={r.value:.6g} target={r.target:.6g} ({r.tolerance})"
    return line + (f"; {r.detail}" if r.detail else "")


class AcceptanceContext:
    """Lazily computed shared inputs (collision integrals are the costly part)."""

    def __init__(self, conditions: GasConditions | None = None, seed: int = 20240607):
        self.conditions = conditions or schmidt_conditions()
        self.seed = seed

    @cached_property
    def derived(self):
        return derive(self.conditions)

    @cached_property
    def model(self):
        return HardSphereModel.from_conditions(self.conditions)

    @cached_property
    def integrals(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            return thermal_integrals(self.model, self.conditions.temperature)

    @cached_property
    def geometric_integrals(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            return thermal_integrals(
                self.model, self.conditions.temperature, transport=geometric_transport(self.model)
            )

    @cached_property
    def relax(self):
        """Relaxation with ``sigma_U = pi a^2`` taken through the radial quadrature."""
        return relaxation(self.derived, self.geometric_integrals)

    @cached_property
    def relax_amplitude(self):
        return relaxation(self.derived, self.integrals)

    @property
    def kT_over_M(self) -> float:
        return K_B * self.conditions.temperature / self.conditions.particle_mass

    @property
    def state(self) -> PolarizationState:
        # partly longitudinal so that Re h1_plus and the exchange terms are exercised
        return PolarizationState.from_polarization(self.derived.number_density, 0.5, 0.8)

    def closed_form_alpha(self) -> float:
        c, d = self.conditions, self.derived
        return 8.0 * math.sqrt(math.pi) / 3.0 * d.number_density * c.hard_core_radius**2 * math.sqrt(
            d.kT / c.particle_mass
        )


def _rel(value: float, target: float) -> float:
    return abs(value - target) / abs(target)


def _within(cid, desc, value, target, rtol, detail="", informational=False) -> CheckResult:
    return CheckResult(
        cid, desc, bool(_rel(value, target) <= rtol), float(value), float(target),
        f"relative {rtol:g}, got {_rel(value, target):.3g}", detail, informational,
    )


def _below(cid, desc, value, bound, detail="") -> CheckResult:
    return CheckResult(cid, desc, bool(value < bound), float(value), float(bound), f"< {bound:g}", detail)


# ----------------------------------------------------------------------
# 1: diagnostics


def check_1a(ctx):
    rep = diagnostics(ctx.conditions, REF_F_PEAK)
    return _within("1a", "a/d", rep.a_over_d, REF_A_OVER_D, 0.05)


def check_1b(ctx):
    rep = diagnostics(ctx.conditions, REF_F_PEAK)
    return _within("1b", "gamma hbar F / p_mean", rep.gradient_momentum_ratio, REF_GRADIENT_RATIO, 0.15)


def check_1c(ctx):
    rep = diagnostics(ctx.conditions, REF_F_PEAK)
    return _within("1c", "k_mean a / hbar", rep.ka_over_hbar, REF_KA, 0.10)


# ----------------------------------------------------------------------
# 2: scattering


def check_2a(ctx):
    x = float(ctx.model.ka_over_hbar(ctx.derived.mean_relative_momentum))
    s = float(angular_xsecs(x, 1e-10)["transport"][0])
    return _within("2a", f"sigma_U / pi a^2 at the gas k_mean (ka/hbar = {x:.4g})", s, 1.0, 0.10)


def check_2a_literal(ctx):
    s = float(angular_xsecs(REF_KA, 1e-10)["transport"][0])
    return _within(
        "2a-literal", "sigma_U / pi a^2 at ka/hbar = 12.5 exactly", s, 1.0, 0.10,
        "sigma_U oscillates with ka about pi a^2",
    )


def check_2b(ctx):
    I = ctx.integrals
    return _below("2b", "|I_I| / I_U", abs(I.I_I) / I.I_U, 0.05)


def check_2c(ctx):
    I = ctx.integrals
    M = ctx.conditions.particle_mass
    return _below("2c", "M |I_pi| / (hbar I_U)", M * abs(I.I_pi) / (HBAR * I.I_U), 0.05)


# ----------------------------------------------------------------------
# 3: relaxation


def check_3a(ctx):
    return _within("3a", "alpha [1/s] (sigma_U = pi a^2 through quadrature)", ctx.relax.alpha, REF_ALPHA, 0.25)


def check_3b(ctx):
    return _within("3b", "D [m^2/s]", ctx.relax.D, REF_D, 0.25)


def check_3c(ctx):
    return _within("3c", "alpha quadrature vs closed form", ctx.relax.alpha, ctx.closed_form_alpha(), 1e-6)


def check_3d(ctx):
    r = ctx.relax
    return _within("3d", "alpha D / (kT/M)", r.alpha * r.D / ctx.kT_over_M, 1.0, 1e-12)


def info_3_amplitude(ctx):
    r = ctx.relax_amplitude
    return _within(
        "3-info", "alpha [1/s] from the full amplitude sigma_U(k)", r.alpha, REF_ALPHA, 0.25,
        f"D = {r.D * 1e6:.4g} mm^2/s", informational=True,
    )


# ----------------------------------------------------------------------
# 4: first-order ODEs


def _random_runs(ctx, n=20):
    rng = np.random.default_rng(ctx.seed)
    alpha = ctx.relax_amplitude.alpha
    for _ in range(n):
        duration = rng.uniform(5.0, 30.0) / alpha
        yield random_waveform(rng, duration, n_breaks=int(rng.integers(2, 8)), G_scale=0.1)


def check_4a(ctx):
    alpha = ctx.relax_amplitude.alpha
    worst = 0.0
    for w in _random_runs(ctx):
        t = np.linspace(0.0, w.duration, 41)
        sol = solve_h1(w, ctx.derived, ctx.integrals, ctx.state, t)
        re, im = analytic_h1_plus(w, alpha, ctx.derived, ctx.state, t)
        for num, ref in ((sol.h1_plus.imag, im), (sol.h1_plus.real, re)):
            scale = np.max(np.abs(ref))
            if scale > 0:
                worst = max(worst, float(np.max(np.abs(num - ref)) / scale))
    return _below("4a", "ODE vs closed form, 20 random waveforms (max relative)", worst, 1e-6)


def check_4b(ctx):
    worst = 0.0
    for k, w in enumerate(_random_runs(ctx)):
        sol = solve_h1(w, ctx.derived, ctx.integrals, ctx.state, exchange=bool(k % 2))
        worst = max(worst, sol.sum_rule_residual)
    return _below("4b", "sum rule residual (exchange on and off)", worst, 1e-6)


def check_4c(ctx):
    alpha = ctx.relax_amplitude.alpha
    w = GradientWaveform.constant(0.1, 20.0 / alpha)
    sol = solve_h1(w, ctx.derived, ctx.integrals, ctx.state, [0.0, w.duration])
    target = w.F(w.duration) / (ctx.conditions.particle_mass * alpha)
    return _within(
        "4c", "Im h1_plus / (F / M alpha) at alpha t = 20, constant G", sol.h1_plus.imag[-1], target, 0.01,
        "exact deviation (1 - exp(-alpha t)) / (alpha t) = 0.05",
    )


def check_4d(ctx):
    alpha = ctx.relax_amplitude.alpha
    w = GradientWaveform.constant(0.1, 20.0 / alpha)
    t = np.linspace(0.0, w.duration, 101)
    off = solve_h1(w, ctx.derived, ctx.integrals, ctx.state, t)
    on = solve_h1(w, ctx.derived, ctx.integrals, ctx.state, t, exchange=True)
    shift = float(np.max(np.abs(on.h1_plus.imag - off.h1_plus.imag)) / np.max(np.abs(off.h1_plus.imag)))
    return _below("4d", "exchange shift of Im h1_plus", shift, 0.05)


# ----------------------------------------------------------------------
# 5: attenuation


def check_5a(ctx):
    rng = np.random.default_rng(ctx.seed + 5)
    gamma = ctx.conditions.gyromagnetic_ratio
    D = ctx.relax.D
    worst = -math.inf
    for _ in range(50):
        w = random_waveform(rng, rng.uniform(1e-4, 1e-2))
        T = w.duration
        raw = gamma**2 * D * w.int_F2(T)
        if raw == 0:
            continue
        w = w.scaled(math.sqrt(rng.uniform(1e-4, 0.1) / raw))
        t = np.linspace(0.0, T, 31)
        kin = transverse_attenuation(w, ctx.relax, gamma, t)
        cls = torrey_attenuation(w, D, gamma, t)
        gap = np.abs((1.0 - kin.attenuation) - (1.0 - cls.magnitude))
        worst = max(worst, float(np.max(gap - 0.5 * kin.exponent**2)))
    slack = 4.0 * np.finfo(float).eps  # rounding in 1 - exp(-x)
    return CheckResult(
        "5a", "second order vs classical exponential, 50 waveforms: max(gap - x^2/2)",
        worst <= slack, worst, 0.0, f"<= 0 up to rounding {slack:.2g}",
    )


def check_5b(ctx):
    gamma = ctx.conditions.gyromagnetic_ratio
    T = REF_SEQUENCE
    G = math.sqrt(3.0 * REF_GAMMA2_INTF2 / (gamma**2 * T**3))
    w = GradientWaveform.constant(G, T)
    m = float(torrey_attenuation(w, REF_D_EXP, gamma, T).magnitude[0])
    return CheckResult("5b", "exp(-0.032 s/mm^2 x 15.9 mm^2/s)", abs(m - 0.601) <= 1e-3, m, 0.601, "absolute 1e-3")


# ----------------------------------------------------------------------
# 6: Monte Carlo


def _mc_waveform_collisionless(ctx, t_end=1e-3, exponent=0.5):
    gamma = ctx.conditions.gyromagnetic_ratio
    G = math.sqrt(exponent / (gamma**2 * ctx.kT_over_M * t_end**4 / 4.0))
    return GradientWaveform.constant(G, t_end)


def check_6a(ctx):
    c = ctx.conditions
    w = _mc_waveform_collisionless(ctx)
    cfg = MCConfig(100_000, ctx.seed, 0.0, c.temperature, c.particle_mass, c.gyromagnetic_ratio, w)
    r = simulate(cfg)
    T = w.duration
    ref = float(no_collision_attenuation(w, c.temperature, c.particle_mass, c.gyromagnetic_ratio, T).magnitude[0])
    half = float(free_streaming_attenuation(w, c.temperature, c.particle_mass, c.gyromagnetic_ratio, T).magnitude[0])
    dev = abs(r.magnitude - ref)
    return CheckResult(
        "6a", "MC alpha = 0 vs exp(-gamma^2 (kT/M) (int F)^2)", dev <= 3 * r.std_error, r.magnitude, ref,
        f"3 SE = {3 * r.std_error:.3g}, got {dev:.3g}",
        f"exact ballistic average (half exponent) = {half:.6g}, {abs(r.magnitude - half) / r.std_error:.2f} SE away",
    )


def check_6b(ctx):
    c = ctx.conditions
    alpha, t_end = 1e5, 1e-3
    D = ctx.kT_over_M / alpha
    gamma = c.gyromagnetic_ratio
    G = math.sqrt(0.5 / (gamma**2 * D * t_end**3 / 3.0))
    w = GradientWaveform.constant(G, t_end)
    cfg = MCConfig(20_000, ctx.seed + 1, alpha, c.temperature, c.particle_mass, gamma, w)
    r = simulate(cfg)
    ref = float(torrey_attenuation(w, D, gamma, t_end).magnitude[0])
    dev = abs(r.magnitude - ref)
    bound = max(3 * r.std_error, 0.05 * ref)
    return CheckResult(
        "6b", "MC alpha t = 100 vs exp(-gamma^2 D int F^2)", dev <= bound, r.magnitude, ref,
        f"max(3 SE, 5%) = {bound:.3g}, got {dev:.3g}",
    )


def check_6c(ctx):
    c = ctx.conditions
    alpha = 1e5
    w = GradientWaveform.zero(1e-3)
    cfg = MCConfig(100_000, ctx.seed + 2, alpha, c.temperature, c.particle_mass, c.gyromagnetic_ratio, w)
    (lag, corr, se), = velocity_autocorrelation(cfg, [1.0 / alpha])
    ref = ctx.kT_over_M * math.exp(-1.0)
    dev = abs(corr - ref)
    return CheckResult(
        "6c", "<v(0) v(1/alpha)> [m^2/s^2]", dev <= 3 * se, corr, ref, f"3 sigma = {3 * se:.3g}, got {dev:.3g}"
    )


def check_6d(ctx):
    c = ctx.conditions
    alpha = ctx.relax.alpha
    T = REF_SEQUENCE
    w = GradientWaveform.constant(0.1, T)
    gamma = c.gyromagnetic_ratio
    nc = float(no_collision_attenuation(w, c.temperature, c.particle_mass, gamma, T).exponent[0])
    tor = float(torrey_attenuation(w, ctx.kT_over_M / alpha, gamma, T).exponent[0])
    return _within(
        "6d", "collisionless / diffusive exponent vs (3/4) alpha T", nc / tor,
        constant_gradient_exponent_ratio(alpha, T), 0.01, f"alpha T = {alpha * T:.3g}",
    )


def check_7(ctx):
    r = check_5b(ctx)
    return CheckResult(
        "7", "experimental D not reproducible; covered by 1-6 and the 5b arithmetic", r.passed, r.value, r.target,
        r.tolerance, "no raw data or gradient waveform available",
    )


CHECKS = {
    "1a": check_1a,
    "1b": check_1b,
    "1c": check_1c,
    "2a": check_2a,
    "2a-literal": check_2a_literal,
    "2b": check_2b,
    "2c": check_2c,
    "3a": check_3a,
    "3b": check_3b,
    "3c": check_3c,
    "3d": check_3d,
    "3-info": info_3_amplitude,
    "4a": check_4a,
    "4b": check_4b,
    "4c": check_4c,
    "4d": check_4d,
    "5a": check_5a,
    "5b": check_5b,
    "6a": check_6a,
    "6b": check_6b,
    "6c": check_6c,
    "6d": check_6d,
    "7": check_7,
}


def run_acceptance(ctx: AcceptanceContext | None = None, ids=None) -> list[CheckResult]:
    ctx = ctx or AcceptanceContext()
    out = []
    for cid in ids or CHECKS:
        t0 = time.perf_counter()
        r = CHECKS[cid](ctx)
        out.append(CheckResult(**{**asdict(r), "seconds": time.perf_counter() - t0}))
    return out


def summary(results: list[CheckResult]) -> dict:
    counted = [r for r in results if not r.informational]
    return {
        "all_passed": all(r.passed for r in counted),
        "n_passed": sum(r.passed for r in counted),
        "n_failed": sum(not r.passed for r in counted),
        "checks": [r.to_json_dict() for r in results],
    }
