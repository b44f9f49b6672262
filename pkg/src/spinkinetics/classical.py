"""Exact classical references for gradient-driven transverse decay.

Two limits bracket the kinetic result.  In the diffusive limit the
magnetisation obeys the Bloch-Torrey equation and decays as
``exp(-gamma^2 D int F^2)``.  Without collisions each particle keeps its
thermal velocity and the spread of ``gamma v int F`` gives a Gaussian in
``int F``.

Two collisionless forms are provided.  :func:`no_collision_attenuation` uses
the exponent ``gamma^2 (kT/M) (int F)^2``.  Averaging the ballistic phase
over a 1-D Maxwellian with variance ``kT/M`` gives a Gaussian with half that
exponent for constant gradients; :func:`free_streaming_attenuation` returns
this average, which a ballistic random walk reproduces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gas import K_B
from .gradient import GradientWaveform
from .kinetic import precession_phase

__all__ = [
    "ClassicalDecay",
    "torrey_attenuation",
    "no_collision_attenuation",
    "free_streaming_attenuation",
    "regime_ratio",
    "constant_gradient_exponent_ratio",
]


@dataclass(frozen=True)
class ClassicalDecay:
    """Magnitude and phase of ``<sigma_+>`` relative to its initial value.

    The classical equation acts on ``M_+`` only; ``M_z`` has no decay channel
    here and keeps its initial value.
    """

    t: np.ndarray
    magnitude: np.ndarray
    phase: np.ndarray
    exponent: np.ndarray
    regime_ratio: float | None = None


def regime_ratio(alpha: float, T_duration: float) -> float:
    """``alpha T``: collisions per particle over the sequence."""
    if alpha < 0 or T_duration < 0:
        raise ValueError("alpha and duration must be non-negative")
    return alpha * T_duration


def _decay(waveform, gamma, t, x, exponent, alpha=None) -> ClassicalDecay:
    return ClassicalDecay(
        t=t,
        magnitude=np.exp(-exponent),
        phase=precession_phase(waveform, gamma, t, x),
        exponent=exponent,
        regime_ratio=None if alpha is None else regime_ratio(alpha, waveform.duration),
    )


def torrey_attenuation(
    waveform: GradientWaveform, D: float, gamma: float, t, x=0.0, *, alpha: float | None = None
) -> ClassicalDecay:
    """Diffusive decay ``exp(-gamma^2 D int_0^t F^2)`` with precession phase.

    Passing ``alpha`` fills ``regime_ratio`` with ``alpha T_total``.
    """
    if not D > 0:
        raise ValueError("D must be positive")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    exponent = gamma**2 * D * np.asarray(waveform.int_F2(t))
    return _decay(waveform, gamma, t, x, exponent, alpha)


def no_collision_attenuation(
    waveform: GradientWaveform, T_kelvin: float, M: float, gamma: float, t, x=0.0, *, alpha: float | None = None
) -> ClassicalDecay:
    """Collisionless decay ``exp(-gamma^2 (kT/M) (int_0^t F)^2)``."""
    if not (T_kelvin > 0 and M > 0):
        raise ValueError("temperature and mass must be positive")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    exponent = gamma**2 * K_B * T_kelvin / M * np.asarray(waveform.int_F(t)) ** 2
    return _decay(waveform, gamma, t, x, exponent, alpha)


def free_streaming_attenuation(
    waveform: GradientWaveform, T_kelvin: float, M: float, gamma: float, t, x=0.0
) -> ClassicalDecay:
    """Maxwell average of ballistic phases for particles starting at the origin.

    A particle moving as ``v t'`` picks up ``-gamma v m1(t)`` with the first
    gradient moment ``m1(t) = int_0^t t' G(t') dt' = t F(t) - int_0^t F``.
    Averaging over a 1-D Maxwellian gives ``exp(-gamma^2 (kT/M) m1^2 / 2)``.
    For constant ``G``, ``m1 = int F = G t^2 / 2``.
    """
    if not (T_kelvin > 0 and M > 0):
        raise ValueError("temperature and mass must be positive")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    m1 = t * np.asarray(waveform.F(t)) - np.asarray(waveform.int_F(t))
    exponent = 0.5 * gamma**2 * K_B * T_kelvin / M * m1**2
    return _decay(waveform, gamma, t, x, exponent)


def constant_gradient_exponent_ratio(alpha: float, T_duration: float) -> float:
    """Collisionless over diffusive exponent for constant ``G``: ``(3/4) alpha T``."""
    return 0.75 * regime_ratio(alpha, T_duration)
