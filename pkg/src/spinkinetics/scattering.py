"""Short-wavelength hard-sphere scattering and thermal collision integrals.

The amplitude is the diffraction (shadow) term plus the geometric reflection
from the illuminated hemisphere::

    t(k, theta) = (2 pi hbar^2 / mu) (a / 2) X(x, theta),   x = k a / hbar
    X = i x (1 + cos theta) J1(x sin theta) / (x sin theta)
        + exp(-2 i x sin(theta / 2))

It is only meaningful for ``x >> 1``; below ``x = 5`` a :class:`ValidityWarning`
is emitted.  Since ``mu^2 |t|^2 / (4 pi^2 hbar^4) = (a^2 / 4) |X|^2`` the angular
integrals are carried out on the dimensionless shape ``X`` and rescaled by
``pi a^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import j1, roots_legendre

from .gas import HBAR, K_B, GasConditions

__all__ = [
    "HardSphereModel",
    "CollisionIntegrals",
    "DifferentialCrossSections",
    "ValidityWarning",
    "QuadratureError",
    "t_short_wavelength",
    "differential_xsecs",
    "transport_xsec",
    "interference_xsec",
    "total_xsec",
    "angular_xsecs",
    "thermal_integrals",
    "geometric_transport",
    "MIN_KA_OVER_HBAR",
]

MIN_KA_OVER_HBAR = 5.0
RADIAL_CUTOFF = 8.0  # k_max = 8 sqrt(2 mu k T)
_SERIES_CUTOFF = 1e-4
_GL_ORDER = 16


class ValidityWarning(UserWarning):
    """Input lies outside the short-wavelength regime of the amplitude."""


class QuadratureError(RuntimeError):
    def __init__(self, message: str, estimate, error):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class HardSphereModel:
    radius: float
    reduced_mass: float

    def __post_init__(self) -> None:
        if not (self.radius > 0 and self.reduced_mass > 0):
            raise ValueError("radius and reduced_mass must be positive")

    @classmethod
    def from_conditions(cls, conditions: GasConditions) -> HardSphereModel:
        return cls(conditions.hard_core_radius, conditions.particle_mass / 2.0)

    def ka_over_hbar(self, k):
        return np.asarray(k, dtype=float) * self.radius / HBAR

    @property
    def amplitude_scale(self) -> float:
        """``(2 pi hbar^2 / mu)(a / 2)``, the t-matrix unit [J m^3]."""
        return 2.0 * math.pi * HBAR**2 / self.reduced_mass * self.radius / 2.0


@dataclass(frozen=True)
class CollisionIntegrals:
    """Maxwell-averaged collision integrals.

    ``I_I`` is purely imaginary; only its imaginary part is stored, and the
    quadrature value of its real part is kept in ``I_I_real_residual`` as a
    consistency check.
    """

    I_U: float
    I_I: float
    I_pi: float
    I_U_error: float
    I_I_error: float
    I_pi_error: float
    I_I_real_residual: float
    temperature: float
    transport_model: str


class DifferentialCrossSections(NamedTuple):
    U: np.ndarray
    A: np.ndarray
    I: np.ndarray


def _j1_over_x(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 0.5 - x2 / 16.0 + x2 * x2 / 384.0, j1(safe) / safe)


def _shape(x, theta, shadow: bool = True, illuminated: bool = True):
    """Dimensionless amplitude ``X(x, theta)``; broadcasts ``x`` and ``theta``."""
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(np.broadcast(x, theta).shape, dtype=complex)
    if shadow:
        out = out + 1j * x * (1.0 + np.cos(theta)) * _j1_over_x(x * np.sin(theta))
    if illuminated:
        out = out + np.exp(-2j * x * np.sin(theta / 2.0))
    return out


def _check_k_theta(k, theta) -> None:
    if np.any(np.asarray(k) <= 0) or not np.all(np.isfinite(k)):
        raise ValueError("relative momentum k must be positive")
    th = np.asarray(theta)
    if np.any(th < 0) or np.any(th > math.pi) or not np.all(np.isfinite(th)):
        raise ValueError("scattering angle must lie in [0, pi]")


def _warn_regime(x) -> None:
    if np.any(np.asarray(x) < MIN_KA_OVER_HBAR):
        warnings.warn(
            f"ka/hbar = {np.min(x):.3g} < {MIN_KA_OVER_HBAR}: short-wavelength amplitude unreliable",
            ValidityWarning,
            stacklevel=3,
        )


def t_short_wavelength(k, theta, model: HardSphereModel):
    """Short-wavelength hard-sphere t-matrix element [J m^3].

    Parameters
    ----------
    k : float or array
        Relative momentum [kg m/s], positive.
    theta : float or array
        Scattering angle in ``[0, pi]``.
    model : HardSphereModel
    """
    _check_k_theta(k, theta)
    x = model.ka_over_hbar(k)
    _warn_regime(x)
    out = model.amplitude_scale * _shape(x, theta)
    return complex(out) if out.ndim == 0 else out


def differential_xsecs(k, theta, model: HardSphereModel, statistics_sign: int = -1) -> DifferentialCrossSections:
    """Unsymmetrised, (anti)symmetrised and interference differential cross sections [m^2/sr]."""
    _check_k_theta(k, theta)
    theta = np.asarray(theta, dtype=float)
    t_fwd = t_short_wavelength(k, theta, model)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        t_bwd = t_short_wavelength(k, math.pi - theta, model)
    mu = model.reduced_mass
    v = np.asarray(k, dtype=float) / mu
    dos = mu * np.asarray(k, dtype=float) / (2.0 * math.pi * HBAR) ** 3
    pref = 2.0 * math.pi / HBAR * dos / v
    dU = pref * np.abs(t_fwd) ** 2
    dA = pref * np.abs(t_fwd + statistics_sign * t_bwd) ** 2 / 2.0
    dI = pref * t_bwd * np.conj(t_fwd)
    return DifferentialCrossSections(dU, dA, dI)


# ----------------------------------------------------------------------
# quadrature


def _gl_rule(m: int):
    nodes, weights = roots_legendre(m)
    return nodes, weights


def _panel_integral(func, lo: float, hi: float, n_panels: int, m: int):
    """Composite Gauss-Legendre of ``func(nodes) -> (..., N)`` on ``[lo, hi]``.

    Returns the integral and the integral of ``|func|``.
    """
    nodes, weights = _gl_rule(m)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    vals = func(pts)
    return vals @ w, np.abs(vals) @ w


def _refine(func, lo, hi, n_panels, rtol, label, max_doublings=8, checked=None):
    """Double the panel count until GL-m and GL-2m agree to ``rtol`` of ``int |f|``.

    ``checked`` selects the leading-axis rows that take part in the test;
    rows that are pure rounding noise would otherwise never converge.
    """
    for _ in range(max_doublings):
        coarse, _ = _panel_integral(func, lo, hi, n_panels, _GL_ORDER)
        fine, mass = _panel_integral(func, lo, hi, n_panels, 2 * _GL_ORDER)
        err = np.abs(fine - coarse)
        tol = rtol * np.maximum(mass, np.finfo(float).tiny)
        ok = err <= tol
        if checked is not None:
            ok = ok[checked]
        if np.all(ok):
            return fine, err
        n_panels *= 2
    raise QuadratureError(f"{label} did not converge", fine, err)


def _angular_panels(x_max: float) -> int:
    # |X|^2 carries phases up to ~2x in theta: half-period panels, 16+ GL nodes each
    return max(8, int(math.ceil(2.0 * x_max)))


def angular_xsecs(ka, rtol: float = 1e-10, shadow: bool = True, illuminated: bool = True) -> dict:
    """Angular integrals at dimensionless momenta ``ka = k a / hbar``.

    Returns a dict of arrays in units of ``pi a^2``: ``transport``,
    ``interference`` (complex), ``total``, plus ``*_error`` estimates.
    """
    ka = np.atleast_1d(np.asarray(ka, dtype=float))
    x = ka[:, None]

    def moments(th):
        X = _shape(x, th, shadow=shadow, illuminated=illuminated)
        Xb = _shape(x, math.pi - th, shadow=shadow, illuminated=illuminated)
        s, c = np.sin(th), np.cos(th)
        mod2 = np.abs(X) ** 2
        interf = 0.5 * s * c * Xb * np.conj(X)
        return np.stack(
            [0.5 * s * (1.0 - c) * mod2, 0.5 * s * mod2, interf.real, interf.imag]
        )

    # Re sigma_I vanishes by symmetry and is left out of the convergence test
    val, err = _refine(
        moments, 0.0, math.pi, _angular_panels(float(ka.max())), rtol, "angular integral", checked=[0, 1, 3]
    )
    return {
        "transport": val[0],
        "total": val[1],
        "interference": val[2] + 1j * val[3],
        "transport_error": err[0],
        "total_error": err[1],
        "interference_error": np.hypot(err[2], err[3]),
    }


def transport_xsec(k: float, model: HardSphereModel, rtol: float = 1e-10) -> float:
    """``sigma_U(k) = int dOmega (1 - cos theta) dsigma_U/dOmega`` [m^2]."""
    _check_k_theta(k, 0.0)
    x = float(model.ka_over_hbar(k))
    _warn_regime(x)
    r = angular_xsecs(x, rtol)
    return float(r["transport"][0]) * math.pi * model.radius**2


def interference_xsec(k: float, model: HardSphereModel, rtol: float = 1e-10) -> complex:
    """``sigma_I(k) = int dOmega cos theta dsigma_I/dOmega`` [m^2], purely imaginary."""
    _check_k_theta(k, 0.0)
    x = float(model.ka_over_hbar(k))
    _warn_regime(x)
    r = angular_xsecs(x, rtol)
    return complex(r["interference"][0]) * math.pi * model.radius**2


def total_xsec(k: float, model: HardSphereModel, rtol: float = 1e-10) -> float:
    _check_k_theta(k, 0.0)
    x = float(model.ka_over_hbar(k))
    r = angular_xsecs(x, rtol)
    return float(r["total"][0]) * math.pi * model.radius**2


def geometric_transport(model: HardSphereModel) -> Callable[[np.ndarray], np.ndarray]:
    """Transport cross section fixed at its geometric limit ``pi a^2``."""
    area = math.pi * model.radius**2

    def geometric(k):
        return np.full(np.shape(k), area)

    return geometric


def thermal_integrals(
    model: HardSphereModel,
    T: float,
    *,
    transport: Callable[[np.ndarray], np.ndarray] | None = None,
    rtol: float = 1e-6,
) -> CollisionIntegrals:
    """Collision integrals averaged over the reduced-mass Maxwell distribution.

    ``I_U = <k^3 sigma_U(k)>``, ``I_I = <k^3 sigma_I(k)>`` and
    ``I_pi = int d^3k k^2 B(k) Re t(k, pi)``.  With ``s = k / sqrt(2 mu k T)``
    the radial measure becomes ``(4 / sqrt(pi)) k_T^n s^(n+2) exp(-s^2) ds``,
    integrated on ``[0, 8]``.  ``I_pi`` is evaluated in closed form because
    only the reflected wave survives at ``theta = pi``.

    Parameters
    ----------
    transport : callable, optional
        Replacement for the quadrature ``sigma_U(k)`` (e.g.
        :func:`geometric_transport`).  ``I_I`` and ``I_pi`` always use the
        amplitude.
    rtol : float
        Relative tolerance of the outer radial quadrature; the inner angular
        integrals run at ``rtol / 100``.
    """
    if not T > 0:
        raise ValueError("temperature must be positive")
    kT_mom = math.sqrt(2.0 * model.reduced_mass * K_B * T)
    x_T = kT_mom * model.radius / HBAR
    k_bar_x = math.sqrt(8.0 * model.reduced_mass * K_B * T / math.pi) * model.radius / HBAR
    _warn_regime(k_bar_x)
    area = math.pi * model.radius**2
    inner_rtol = rtol / 100.0
    chunk = 64

    def angular_block(s):
        s = np.asarray(s)
        res = np.empty((3, s.size))
        for lo in range(0, s.size, chunk):
            sl = slice(lo, lo + chunk)
            xs = np.maximum(s[sl] * x_T, 1e-300)
            r = angular_xsecs(xs, inner_rtol)
            res[0, sl] = r["transport"] * area
            res[1, sl] = r["interference"].imag * area
            res[2, sl] = r["interference"].real * area
        return res

    def radial(s):
        w5 = s**5 * np.exp(-s * s)
        ang = angular_block(s)
        if transport is not None:
            ang[0] = transport(s * kT_mom)
        return w5 * ang

    n0 = 16
    # sigma_U oscillates in s with period ~pi / x_T
    n_rad = max(n0, int(math.ceil(x_T * RADIAL_CUTOFF / math.pi)))
    val, err = _refine(radial, 0.0, RADIAL_CUTOFF, n_rad, rtol, "thermal integral", checked=[0, 1])
    pref3 = 4.0 / math.sqrt(math.pi) * kT_mom**3

    # Backscattering keeps only the reflected wave, Re t(k, pi) = S cos(2 k a / hbar),
    # so the Gaussian radial integral is elementary.
    b = 2.0 * x_T
    vpi = math.sqrt(math.pi) / 32.0 * (b**4 - 12.0 * b**2 + 12.0) * math.exp(-0.25 * b * b)
    pref2 = 4.0 / math.sqrt(math.pi) * kT_mom**2

    return CollisionIntegrals(
        I_U=float(pref3 * val[0]),
        I_I=float(pref3 * val[1]),
        I_pi=float(pref2 * model.amplitude_scale * vpi),
        I_U_error=float(pref3 * err[0]),
        I_I_error=float(pref3 * err[1]),
        I_pi_error=0.0,
        I_I_real_residual=float(pref3 * val[2]),
        temperature=T,
        transport_model="amplitude" if transport is None else getattr(transport, "__name__", "custom"),
    )
