"""First- and second-order distortions of the spin Wigner distribution.

The gradient perturbs the thermal distributions through momentum-independent
amplitudes ``h1_half``, ``h1_mhalf`` (real) and ``h1_plus`` (complex).  Their
evolution is a linear ODE system driven by ``G(t)`` and ``F(t)``; collisions
relax ``h1_plus`` at the rate ``alpha = (4 beta / 3M) n I_U``.  Exchange
(statistics) terms carry ``I_I`` and ``I_pi`` and are kept switchable.

Conventions
-----------
``beta = 1 / (2 M k T)``.  ``n_plus`` relates to the transverse polarisation
through ``<sigma_+> = c n_plus / n``; ``c`` is a convention constant (2 from
the density-matrix definition, 1 from the population bookkeeping).  Only
attenuation ratios are reported, and they do not depend on ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .gas import HBAR, DerivedParams
from .gradient import GradientWaveform
from .scattering import CollisionIntegrals

__all__ = [
    "PolarizationState",
    "RelaxationParams",
    "FirstOrderSolution",
    "AttenuationResult",
    "IntegrationError",
    "SIGMA_PLUS_CONVENTION",
    "SECOND_ORDER_WARNING",
    "relaxation",
    "solve_h1",
    "analytic_h1_plus",
    "h2_plus",
    "transverse_attenuation",
    "precession_phase",
]

SIGMA_PLUS_CONVENTION = 2.0
SECOND_ORDER_WARNING = 0.2
# guard for the explicit stepper: alpha * T / (max step fraction) steps at least
_MAX_STEPS = 2_000_000


class IntegrationError(RuntimeError):
    """ODE integration failed; ``diagnostics`` holds solver status details."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(f"{message}: {diagnostics}")
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class PolarizationState:
    """Zeroth-order spin populations ``n_{1/2}``, ``n_{-1/2}`` and coherence ``n_+``."""

    n_half: float
    n_mhalf: float
    n_plus: complex
    convention: float = SIGMA_PLUS_CONVENTION

    def __post_init__(self) -> None:
        if not (self.n_half >= 0 and self.n_mhalf >= 0):
            raise ValueError("spin populations must be non-negative")
        if not self.n > 0:
            raise ValueError("total density must be positive")
        if not self.convention > 0:
            raise ValueError("convention constant must be positive")
        if self.bloch_norm2 > 1.0 + 1e-12:
            raise ValueError(f"polarization exceeds unity: |P|^2 = {self.bloch_norm2:.6g}")

    @property
    def n(self) -> float:
        return self.n_half + self.n_mhalf

    @property
    def sigma_z(self) -> float:
        return (self.n_half - self.n_mhalf) / self.n

    @property
    def sigma_plus(self) -> complex:
        return self.convention * complex(self.n_plus) / self.n

    @property
    def bloch_norm2(self) -> float:
        return self.sigma_z**2 + abs(self.sigma_plus) ** 2

    @classmethod
    def from_polarization(
        cls, n: float, sigma_z: float, sigma_plus: complex, convention: float = SIGMA_PLUS_CONVENTION
    ) -> PolarizationState:
        """Build from total density and the Bloch components ``<sigma_z>``, ``<sigma_+>``."""
        if not n > 0:
            raise ValueError("total density must be positive")
        return cls(
            n_half=0.5 * n * (1.0 + sigma_z),
            n_mhalf=0.5 * n * (1.0 - sigma_z),
            n_plus=complex(sigma_plus) * n / convention,
            convention=convention,
        )

    @classmethod
    def transverse(cls, n: float, convention: float = SIGMA_PLUS_CONVENTION) -> PolarizationState:
        """Fully transverse state after a pi/2 tip: ``<sigma_z> = 0``, ``|<sigma_+>| = 1``."""
        return cls.from_polarization(n, 0.0, 1.0, convention)


@dataclass(frozen=True)
class RelaxationParams:
    alpha: float
    D: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.D > 0):
            raise ValueError("alpha and D must be positive")


@dataclass(frozen=True)
class FirstOrderSolution:
    """``h1`` amplitudes on a time grid, in (kg m/s)^-1."""

    t: np.ndarray
    h1_half: np.ndarray
    h1_mhalf: np.ndarray
    h1_plus: np.ndarray
    sum_rule_residual: float
    exchange: bool
    n_rhs_evals: int


@dataclass(frozen=True)
class AttenuationResult:
    t: np.ndarray
    phase: np.ndarray
    attenuation: np.ndarray
    exponent: np.ndarray
    validity_warning: str | None = None


def relaxation(derived: DerivedParams, integrals: CollisionIntegrals) -> RelaxationParams:
    """Collision rate ``alpha = (4 beta / 3M) n I_U`` and ``D = kT / (M alpha)``."""
    M = derived.particle_mass
    alpha = 4.0 * derived.beta_M / (3.0 * M) * derived.number_density * integrals.I_U
    return RelaxationParams(alpha=alpha, D=derived.kT / (M * alpha))


def _rhs_factory(derived, integrals, state, eps, scale_half, scale_plus):
    """Right-hand side in scaled variables; ``eps=None`` switches exchange off."""
    M = derived.particle_mass
    beta = derived.beta_M
    A = 4.0 * beta / (3.0 * M)
    nh, nm = state.n_half, state.n_mhalf
    n = nh + nm
    pol = nh - nm
    exchange = eps is not None
    np2 = abs(complex(state.n_plus)) ** 2
    I_U = integrals.I_U
    ImI = integrals.I_I
    I_pi = integrals.I_pi
    hb = HBAR * beta
    k_pi_half = 8.0 * beta / (3.0 * HBAR)
    k_pi_plus = 4.0 * beta / (3.0 * HBAR)

    def rhs(t, y, t0, g0, slope, fc):
        h_h = y[0] * scale_half
        h_m = y[1] * scale_half
        hp = complex(y[2], y[3]) * scale_plus
        w = t - t0
        G = g0 + slope * w
        F = fc[0] + w * (fc[1] + w * fc[2])
        # exchange contributions to the population equations (before dividing by n_{+-1/2})
        x_pop = 0.0
        if exchange:
            x_pop = -2.0 * eps * A * np2 * hp.imag * ImI + eps * k_pi_half * np2 * hp.imag * I_pi
        direct = A * (h_m - h_h) * I_U
        dh_h = hb * G + (nm * direct + (x_pop / nh if nh > 0 else 0.0))
        dh_m = -hb * G - (nh * direct + (x_pop / nm if nm > 0 else 0.0))
        s = nh * h_h + nm * h_m
        dhp = 1j * F / M + A * (s - n * hp) * I_U
        if exchange:
            dlt = nh * h_h - nm * h_m
            v = dlt - pol * hp
            dhp += eps * A * v * (1j * ImI) - 1j * eps * k_pi_plus * v * I_pi
        return np.array([dh_h / scale_half, dh_m / scale_half, dhp.real / scale_plus, dhp.imag / scale_plus])

    return rhs


def solve_h1(
    waveform: GradientWaveform,
    derived: DerivedParams,
    integrals: CollisionIntegrals,
    state: PolarizationState,
    t_eval=None,
    *,
    exchange: bool = False,
    statistics_sign: int = -1,
    rtol: float = 1e-8,
    max_step_fraction: float = 0.1,
    method: str = "DOP853",
) -> FirstOrderSolution:
    """Integrate the four real first-order ODEs from zero initial data.

    Parameters
    ----------
    t_eval : array_like, optional
        Output times in ``[0, T_total]``; defaults to 201 uniform points.
    exchange : bool
        Include the statistics terms in ``I_I`` and ``I_pi``.
    statistics_sign : int
        ``-1`` for fermions, ``+1`` for bosons; only used with ``exchange``.
    max_step_fraction : float
        Largest step as a fraction of ``1 / alpha``.

    Notes
    -----
    The waveform is integrated segment by segment so that jumps in ``G``
    never sit inside a step.  Variables are scaled by their quasi-static
    magnitudes so one absolute tolerance fits all four.
    """
    if statistics_sign not in (-1, 1):
        raise ValueError("statistics_sign must be -1 or +1")
    T = waveform.duration
    t_eval = np.linspace(0.0, T, 201) if t_eval is None else np.asarray(t_eval, dtype=float)
    if t_eval.ndim != 1 or t_eval.size == 0:
        raise ValueError("t_eval must be a non-empty 1-D array")
    if np.any(np.diff(t_eval) < 0) or t_eval[0] < 0 or t_eval[-1] > T * (1 + 1e-12):
        raise ValueError("t_eval must be sorted within the waveform domain")

    rel = relaxation(derived, integrals)
    alpha = rel.alpha
    max_step = max_step_fraction / alpha
    if T / max_step > _MAX_STEPS:
        raise ValueError(
            f"alpha*T = {alpha * T:.3g} needs more than {_MAX_STEPS} steps; use analytic_h1_plus"
        )

    F_scale = waveform.peak_F()
    n_out = t_eval.size
    zeros = np.zeros(n_out)
    if F_scale == 0.0:
        return FirstOrderSolution(t_eval, zeros, zeros.copy(), zeros.astype(complex), 0.0, exchange, 0)

    M = derived.particle_mass
    scale_half = HBAR * derived.beta_M * F_scale
    scale_plus = F_scale / (M * alpha)
    rhs = _rhs_factory(derived, integrals, state, float(statistics_sign) if exchange else None, scale_half, scale_plus)
    atol = rtol * 1e-3

    out = np.zeros((4, n_out))
    y = np.zeros(4)
    seg = waveform._seg
    n_evals = 0
    for i in range(len(seg["t0"])):
        a = float(seg["t0"][i])
        b = float(seg["t0"][i + 1]) if i + 1 < len(seg["t0"]) else T
        if b <= a:
            continue
        args = (a, float(seg["g0"][i]), float(seg["slope"][i]), tuple(seg["F"][i]))
        inside = (t_eval > a) & (t_eval <= b)
        pts = t_eval[inside]
        if pts.size == 0 or pts[-1] != b:
            pts = np.append(pts, b)
        sol = solve_ivp(
            rhs, (a, b), y, method=method, t_eval=pts, args=args, rtol=rtol, atol=atol, max_step=max_step
        )
        if not sol.success:
            raise IntegrationError(
                "first-order ODE integration failed",
                {"message": sol.message, "t_start": a, "t_end": b, "nfev": sol.nfev, "status": sol.status},
            )
        n_evals += sol.nfev
        out[:, inside] = sol.y[:, : int(inside.sum())]
        y = sol.y[:, -1]
    if not np.all(np.isfinite(out)):
        raise IntegrationError("non-finite h1 values", {"t_first_bad": float(t_eval[~np.isfinite(out).all(0)][0])})

    h_h = out[0] * scale_half
    h_m = out[1] * scale_half
    hp = (out[2] + 1j * out[3]) * scale_plus
    target = (state.n_half - state.n_mhalf) * HBAR * derived.beta_M * np.asarray(waveform.F(t_eval))
    lhs = state.n_half * h_h + state.n_mhalf * h_m
    norm = state.n * scale_half
    residual = float(np.max(np.abs(lhs - target)) / norm)
    return FirstOrderSolution(t_eval, h_h, h_m, hp, residual, exchange, n_evals)


def analytic_h1_plus(
    waveform: GradientWaveform, alpha: float, derived: DerivedParams, state: PolarizationState, t
):
    """Exchange-free closed form of ``(Re h1_plus, Im h1_plus)`` at times ``t``.

    With ``C(t) = exp(-alpha t) int_0^t F(t') exp(alpha t') dt'`` (evaluated
    piecewise exactly by :meth:`GradientWaveform.lowpass_F`)::

        Re h1_plus = (alpha / n) (n_half - n_mhalf) hbar beta C(t)
        Im h1_plus = C(t) / M
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    C = waveform.lowpass_F(alpha, t)
    re = alpha * (state.n_half - state.n_mhalf) / state.n * HBAR * derived.beta_M * C
    im = C / derived.particle_mass
    return re, im


def h2_plus(waveform: GradientWaveform, alpha: float, M: float, t):
    """Quasi-static second-order amplitude ``-(1 / (M^2 alpha)) int_0^t F^2``."""
    if not (alpha > 0 and M > 0):
        raise ValueError("alpha and M must be positive")
    return -waveform.int_F2(t) / (M * M * alpha)


def precession_phase(waveform: GradientWaveform, gamma: float, t, x=0.0):
    """``exp[-i gamma (B0 t + (u . x) F(t))]``.

    ``x`` is either a 3-vector position or directly its projection on ``u``.
    """
    xa = np.asarray(x, dtype=float)
    proj = float(xa @ waveform.u) if xa.shape == (3,) else float(xa)
    t = np.asarray(t, dtype=float)
    return np.exp(-1j * gamma * (waveform.B0 * t + proj * np.asarray(waveform.F(t))))


def transverse_attenuation(
    waveform: GradientWaveform, relax: RelaxationParams, gamma: float, t, x=0.0
) -> AttenuationResult:
    """Second-order transverse polarisation ``1 - gamma^2 D int_0^t F^2``.

    ``validity_warning`` is set when the second-order term exceeds
    :data:`SECOND_ORDER_WARNING`; the resummed exponential lives in
    :mod:`spinkinetics.classical`.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    exponent = gamma**2 * relax.D * np.asarray(waveform.int_F2(t))
    warn = None
    worst = float(np.max(exponent)) if exponent.size else 0.0
    if worst > SECOND_ORDER_WARNING:
        warn = (
            f"second-order term gamma^2 D int F^2 = {worst:.3g} exceeds {SECOND_ORDER_WARNING}; "
            "use the classical exponential"
        )
    return AttenuationResult(
        t=t,
        phase=precession_phase(waveform, gamma, t, x),
        attenuation=1.0 - exponent,
        exponent=exponent,
        validity_warning=warn,
    )
