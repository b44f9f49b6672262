"""Physical conditions of the dilute spin-1/2 gas and derived scales.

Everything is SI internally.  Conversion from practical units (atm, Angstrom,
amu, MHz/T) happens only in :meth:`GasConditions.from_json_dict`.

Conventions
-----------
``mean_momentum`` is the Maxwell mean ``M * sqrt(8 kT / (pi M))`` and
``mean_relative_momentum`` the same average for the reduced mass ``M / 2``.
The gyromagnetic ratio is angular (rad s^-1 T^-1); the JSON key
``gyromagnetic_ratio_MHz_per_T`` is read as ``1e6 rad s^-1 T^-1`` per unit,
which is how 204 MHz/T for helium-3 becomes 2.04e8 rad/(s T).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import constants as sc

__all__ = [
    "K_B",
    "HBAR",
    "ATM",
    "AMU",
    "HELIUM3_MASS",
    "GasConditions",
    "DerivedParams",
    "ValidityFlag",
    "DiagnosticsReport",
    "derive",
    "maxwell_boltzmann",
    "diagnostics",
    "schmidt_conditions",
    "THRESHOLDS",
]

K_B = sc.k
HBAR = sc.hbar
ATM = sc.atm
AMU = sc.atomic_mass
HELIUM3_MASS = 3.0160293 * AMU

# Validity thresholds; the physics only says "much less than".
THRESHOLDS = {
    "a_over_d": 0.3,
    "gradient_momentum_ratio": 1e-3,
    "ka_over_hbar": 5.0,
    "degeneracy": 1e-2,
}


@dataclass(frozen=True)
class GasConditions:
    temperature: float
    pressure: float
    particle_mass: float
    gyromagnetic_ratio: float
    hard_core_radius: float
    statistics_sign: int = -1

    def __post_init__(self) -> None:
        for name in ("temperature", "pressure", "particle_mass", "hard_core_radius"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if not math.isfinite(self.gyromagnetic_ratio):
            raise ValueError("gyromagnetic_ratio must be finite")
        if self.statistics_sign not in (-1, 1):
            raise ValueError("statistics_sign must be -1 (fermions) or +1 (bosons)")

    _JSON_KEYS = (
        "temperature_K",
        "pressure_atm",
        "particle_mass_amu",
        "gyromagnetic_ratio_MHz_per_T",
        "hard_core_radius_A",
        "statistics_sign",
    )

    def to_json_dict(self) -> dict:
        return {
            "temperature_K": self.temperature,
            "pressure_atm": self.pressure / ATM,
            "particle_mass_amu": self.particle_mass / AMU,
            "gyromagnetic_ratio_MHz_per_T": self.gyromagnetic_ratio / 1e6,
            "hard_core_radius_A": self.hard_core_radius / 1e-10,
            "statistics_sign": self.statistics_sign,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> GasConditions:
        unknown = set(d) - set(cls._JSON_KEYS)
        if unknown:
            raise ValueError(f"unknown gas keys: {sorted(unknown)}")
        missing = set(cls._JSON_KEYS[:5]) - set(d)
        if missing:
            raise ValueError(f"missing gas keys: {sorted(missing)}")
        return cls(
            temperature=float(d["temperature_K"]),
            pressure=float(d["pressure_atm"]) * ATM,
            particle_mass=float(d["particle_mass_amu"]) * AMU,
            gyromagnetic_ratio=float(d["gyromagnetic_ratio_MHz_per_T"]) * 1e6,
            hard_core_radius=float(d["hard_core_radius_A"]) * 1e-10,
            statistics_sign=int(d.get("statistics_sign", -1)),
        )


@dataclass(frozen=True)
class DerivedParams:
    """Thermodynamic and kinematic scales derived from :class:`GasConditions`."""

    number_density: float
    mean_spacing: float
    beta_M: float
    mean_momentum: float
    mean_relative_momentum: float
    mean_wavelength: float
    reduced_mass: float
    degeneracy: float
    temperature: float
    particle_mass: float

    @property
    def kT(self) -> float:
        return K_B * self.temperature


@dataclass(frozen=True)
class ValidityFlag:
    name: str
    value: float
    threshold: float
    comparison: str  # "<=" or ">="
    passed: bool


@dataclass(frozen=True)
class DiagnosticsReport:
    a_over_d: float
    gradient_momentum_ratio: float
    ka_over_hbar: float
    degeneracy: float
    validity_flags: tuple[ValidityFlag, ...]

    @property
    def all_passed(self) -> bool:
        return all(f.passed for f in self.validity_flags)

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["validity_flags"] = [asdict(f) for f in self.validity_flags]
        d["all_passed"] = self.all_passed
        return d


def derive(conditions: GasConditions) -> DerivedParams:
    """Ideal-gas density and thermal momentum scales."""
    T = conditions.temperature
    M = conditions.particle_mass
    kT = K_B * T
    n = conditions.pressure / kT
    mu = M / 2.0
    p_bar = M * math.sqrt(8.0 * kT / (math.pi * M))
    k_bar = math.sqrt(8.0 * mu * kT / math.pi)
    lam = HBAR / p_bar
    return DerivedParams(
        number_density=n,
        mean_spacing=n ** (-1.0 / 3.0),
        beta_M=1.0 / (2.0 * M * kT),
        mean_momentum=p_bar,
        mean_relative_momentum=k_bar,
        mean_wavelength=lam,
        reduced_mass=mu,
        degeneracy=n * lam**3,
        temperature=T,
        particle_mass=M,
    )


def maxwell_boltzmann(p, mass: float, T: float):
    """Normalised momentum-space density ``(beta/pi)^{3/2} exp(-beta p^2)``.

    ``beta = 1 / (2 mass k T)``; integrates to one over ``d^3p``.
    """
    if mass <= 0 or T <= 0:
        raise ValueError("mass and temperature must be positive")
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("momentum magnitude must be non-negative")
    beta = 1.0 / (2.0 * mass * K_B * T)
    out = (beta / math.pi) ** 1.5 * np.exp(-beta * p * p)
    return float(out) if out.ndim == 0 else out


def diagnostics(conditions: GasConditions, F_peak: float) -> DiagnosticsReport:
    """Dimensionless validity ratios; failing flags are reported, never raised."""
    if F_peak < 0:
        raise ValueError("F_peak must be non-negative")
    d = derive(conditions)
    values = {
        "a_over_d": conditions.hard_core_radius / d.mean_spacing,
        "gradient_momentum_ratio": abs(conditions.gyromagnetic_ratio) * HBAR * F_peak / d.mean_momentum,
        "ka_over_hbar": d.mean_relative_momentum * conditions.hard_core_radius / HBAR,
        "degeneracy": d.degeneracy,
    }
    flags = []
    for name, value in values.items():
        thr = THRESHOLDS[name]
        if name == "ka_over_hbar":
            flags.append(ValidityFlag(name, value, thr, ">=", value >= thr))
        else:
            flags.append(ValidityFlag(name, value, thr, "<=", value <= thr))
    return DiagnosticsReport(validity_flags=tuple(flags), **values)


def schmidt_conditions() -> GasConditions:
    """Helium-3 at 293 K and 7 atm with a 2.4 Angstrom hard core."""
    return GasConditions(
        temperature=293.0,
        pressure=7.0 * ATM,
        particle_mass=HELIUM3_MASS,
        gyromagnetic_ratio=2.04e8,
        hard_core_radius=2.4e-10,
        statistics_sign=-1,
    )
