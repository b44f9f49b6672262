from __future__ import annotations

import warnings

import pytest

from spinkinetics.gas import derive, schmidt_conditions
from spinkinetics.kinetic import relaxation
from spinkinetics.scattering import HardSphereModel, ValidityWarning, geometric_transport, thermal_integrals


@pytest.fixture(scope="session")
def conditions():
    return schmidt_conditions()


@pytest.fixture(scope="session")
def derived(conditions):
    return derive(conditions)


@pytest.fixture(scope="session")
def model(conditions):
    return HardSphereModel.from_conditions(conditions)


@pytest.fixture(scope="session")
def integrals(model, conditions):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        return thermal_integrals(model, conditions.temperature)


@pytest.fixture(scope="session")
def geometric_integrals(model, conditions):
    return thermal_integrals(model, conditions.temperature, transport=geometric_transport(model))


@pytest.fixture(scope="session")
def relax(derived, integrals):
    return relaxation(derived, integrals)
