"""Shared fixtures: presets and one cached charge/relax run."""
import pytest

from qbsim import (
    CompositeBasis,
    charge_relax_scenario,
    device_preset,
    rate_preset,
    run_scenario,
)


@pytest.fixture(scope="session")
def rates():
    return rate_preset()


@pytest.fixture(scope="session")
def m1():
    return device_preset("mechanism1")


@pytest.fixture(scope="session")
def m2():
    return device_preset("mechanism2")


@pytest.fixture(scope="session")
def cavity_series():
    return [device_preset(f"cavity{i}") for i in range(1, 6)]


@pytest.fixture(scope="session")
def basis():
    return CompositeBasis(2)


@pytest.fixture(scope="session")
def m1_trajectory(m1, rates):
    """Donor-mechanism charge/relax run reused across observable tests."""
    return run_scenario(charge_relax_scenario(m1, rates, charge_ns=100.0, relax_ns=1e4))
