"""Transverse spin decay of a dilute spin-1/2 gas in a field gradient.

Quantum kinetic theory with hard-sphere collisions, checked against the
classical diffusion solution and a random-walk oracle.
"""

from .classical import (
    ClassicalDecay,
    free_streaming_attenuation,
    no_collision_attenuation,
    regime_ratio,
    torrey_attenuation,
)
from .gas import (
    DerivedParams,
    DiagnosticsReport,
    GasConditions,
    derive,
    diagnostics,
    maxwell_boltzmann,
    schmidt_conditions,
)
from .gradient import GradientWaveform, WaveformDomainError, WaveformMoments
from .kinetic import (
    AttenuationResult,
    FirstOrderSolution,
    PolarizationState,
    RelaxationParams,
    analytic_h1_plus,
    h2_plus,
    relaxation,
    solve_h1,
    transverse_attenuation,
)
from .montecarlo import MCConfig, MCResult, simulate, velocity_autocorrelation
from .scattering import (
    CollisionIntegrals,
    HardSphereModel,
    differential_xsecs,
    interference_xsec,
    t_short_wavelength,
    thermal_integrals,
    transport_xsec,
)

__version__ = "0.1.0"

__all__ = [
    "AttenuationResult",
    "ClassicalDecay",
    "CollisionIntegrals",
    "DerivedParams",
    "DiagnosticsReport",
    "FirstOrderSolution",
    "GasConditions",
    "GradientWaveform",
    "HardSphereModel",
    "MCConfig",
    "MCResult",
    "PolarizationState",
    "RelaxationParams",
    "WaveformDomainError",
    "WaveformMoments",
    "analytic_h1_plus",
    "derive",
    "diagnostics",
    "differential_xsecs",
    "free_streaming_attenuation",
    "h2_plus",
    "interference_xsec",
    "maxwell_boltzmann",
    "no_collision_attenuation",
    "regime_ratio",
    "relaxation",
    "schmidt_conditions",
    "simulate",
    "solve_h1",
    "t_short_wavelength",
    "thermal_integrals",
    "torrey_attenuation",
    "transport_xsec",
    "transverse_attenuation",
    "velocity_autocorrelation",
]
