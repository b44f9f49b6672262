"""Run configuration: one JSON document in, typed settings out.

Every section rejects unknown keys.  Gas quantities use practical units
(K, atm, amu, MHz/T read as 1e6 rad/(s T), Angstrom); the waveform uses SI
(``B0_T``, ``u``, ``breakpoints`` as ``[t_s, G_T_per_m]`` pairs).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .gas import GasConditions, schmidt_conditions
from .gradient import GradientWaveform
from .kinetic import SIGMA_PLUS_CONVENTION, PolarizationState

__all__ = [
    "ConfigError",
    "PolarizationSettings",
    "XsecSettings",
    "DecaySettings",
    "MCSettings",
    "RunConfig",
    "COLLISION_MODELS",
    "load_config",
    "default_config",
]

COLLISION_MODELS = ("amplitude", "geometric")


class ConfigError(ValueError):
    pass


def _strict(cls, d, section: str):
    if d is None:
        return cls()
    if not isinstance(d, dict):
        raise ConfigError(f"section '{section}' must be an object")
    names = {f.name for f in fields(cls)}
    unknown = set(d) - names
    if unknown:
        raise ConfigError(f"unknown keys in '{section}': {sorted(unknown)}")
    try:
        return cls(**d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{section}': {exc}") from exc


@dataclass(frozen=True)
class PolarizationSettings:
    """Bloch components after the tip; ``<sigma_+> = c n_+ / n``."""

    sigma_z: float = 0.0
    sigma_plus_re: float = 1.0
    sigma_plus_im: float = 0.0
    convention: float = SIGMA_PLUS_CONVENTION

    def __post_init__(self) -> None:
        if self.sigma_z**2 + self.sigma_plus_re**2 + self.sigma_plus_im**2 > 1.0 + 1e-12:
            raise ValueError("polarization vector longer than one")
        if not self.convention > 0:
            raise ValueError("convention must be positive")

    def state(self, n: float) -> PolarizationState:
        return PolarizationState.from_polarization(
            n, self.sigma_z, complex(self.sigma_plus_re, self.sigma_plus_im), self.convention
        )


@dataclass(frozen=True)
class XsecSettings:
    ka_min: float = 5.0
    ka_max: float = 50.0
    n_points: int = 91

    def __post_init__(self) -> None:
        if not (0 < self.ka_min <= self.ka_max):
            raise ValueError("need 0 < ka_min <= ka_max")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")


@dataclass(frozen=True)
class DecaySettings:
    """Time grid ``[0, T_total]`` with ``n_points`` samples; ``x_m`` is ``u . x``."""

    n_points: int = 101
    x_m: float = 0.0

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")


@dataclass(frozen=True)
class MCSettings:
    """``collision_rate_per_s=None`` takes alpha from the kinetic model."""

    n_particles: int = 20000
    seed: int = 12345
    collision_rate_per_s: float | None = None
    dt_s: float | None = None
    n_blocks: int = 50
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("n_particles", "seed", "n_blocks", "workers"):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise ValueError(f"{name} must be an integer")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name in ("collision_rate_per_s", "dt_s"):
            v = getattr(self, name)
            if v is not None and not (isinstance(v, (int, float)) and v >= 0):
                raise ValueError(f"{name} must be a non-negative number or null")


@dataclass(frozen=True)
class RunConfig:
    gas: GasConditions = field(default_factory=schmidt_conditions)
    waveform: GradientWaveform = field(default_factory=lambda: GradientWaveform.constant(0.1, 3.5e-4))
    polarization: PolarizationSettings = field(default_factory=PolarizationSettings)
    xsec: XsecSettings = field(default_factory=XsecSettings)
    decay: DecaySettings = field(default_factory=DecaySettings)
    mc: MCSettings = field(default_factory=MCSettings)
    collision_model: str = "amplitude"

    def __post_init__(self) -> None:
        if self.collision_model not in COLLISION_MODELS:
            raise ConfigError(f"collision_model must be one of {COLLISION_MODELS}")

    def to_json_dict(self) -> dict:
        return {
            "gas": self.gas.to_json_dict(),
            "waveform": self.waveform.to_json_dict(),
            "polarization": asdict(self.polarization),
            "xsec": asdict(self.xsec),
            "decay": asdict(self.decay),
            "mc": asdict(self.mc),
            "collision_model": self.collision_model,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json_dict(cls, d: dict) -> RunConfig:
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        allowed = {f.name for f in fields(cls)}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
        kw = {}
        try:
            if "gas" in d:
                kw["gas"] = GasConditions.from_json_dict(d["gas"])
            if "waveform" in d:
                kw["waveform"] = GradientWaveform.from_json_dict(d["waveform"])
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc
        kw["polarization"] = _strict(PolarizationSettings, d.get("polarization"), "polarization")
        kw["xsec"] = _strict(XsecSettings, d.get("xsec"), "xsec")
        kw["decay"] = _strict(DecaySettings, d.get("decay"), "decay")
        kw["mc"] = _strict(MCSettings, d.get("mc"), "mc")
        if "collision_model" in d:
            kw["collision_model"] = d["collision_model"]
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from exc
        return cls.from_json_dict(data)

    def with_seed(self, seed: int) -> RunConfig:
        return replace(self, mc=replace(self.mc, seed=seed))


def default_config() -> RunConfig:
    """Helium-3 at 293 K, 7 atm; constant 0.1 T/m for 0.35 ms (``F_peak = 3.5e-5 T s/m``)."""
    return RunConfig()


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return default_config()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return RunConfig.from_json(text)
