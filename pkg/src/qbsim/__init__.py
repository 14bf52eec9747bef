"""Simulator and fitting toolkit for triplet-storage polariton batteries."""

from .hilbert import CompositeBasis, DensityMatrix
from .model import DeviceParams, RateParams, HBAR_EV_NS, cavity_energy, classify_regime
from .dynamics import Liouvillian, Trajectory, build_liouvillian, propagate, steady_state
from .polaritons import (
    DetuningReport,
    PolaritonBranch,
    branch_by_label,
    detuning,
    effective_triplet_lifetime,
    find_resonance,
    polariton_branches,
    single_excitation_hamiltonian,
)
from .observables import (
    DecayFit,
    EnergyFigures,
    FeatureRecord,
    LossyBranch,
    battery_capacity,
    charging_metrics,
    fit_exponential_decay,
    lossy_branches,
    populations,
    radiative_flux,
    stored_energy_density,
    trajectory_populations,
    trapezoid_integral,
    volumetric_energy_density,
)
from .protocols import (
    Phase,
    Scenario,
    SweepResult,
    FeatureTable,
    charge_relax_scenario,
    run_scenario,
    sweep_cavity_energy,
    sweep_detuning_features,
)
from .fitting import (
    DispersionData,
    DispersionRecord,
    FitResult,
    fit_coupled_oscillator,
    fit_triplet_coupling,
    minimize,
    read_dispersion_csv,
    read_feature_csv,
)
from .presets import device_preset, rate_preset

__version__ = "0.1.0"

__all__ = [
    "CompositeBasis",
    "DensityMatrix",
    "DeviceParams",
    "RateParams",
    "HBAR_EV_NS",
    "cavity_energy",
    "classify_regime",
    "Liouvillian",
    "Trajectory",
    "build_liouvillian",
    "propagate",
    "steady_state",
    "DetuningReport",
    "PolaritonBranch",
    "branch_by_label",
    "detuning",
    "effective_triplet_lifetime",
    "find_resonance",
    "polariton_branches",
    "single_excitation_hamiltonian",
    "DecayFit",
    "EnergyFigures",
    "FeatureRecord",
    "LossyBranch",
    "battery_capacity",
    "charging_metrics",
    "fit_exponential_decay",
    "lossy_branches",
    "populations",
    "radiative_flux",
    "stored_energy_density",
    "trajectory_populations",
    "trapezoid_integral",
    "volumetric_energy_density",
    "Phase",
    "Scenario",
    "SweepResult",
    "FeatureTable",
    "charge_relax_scenario",
    "run_scenario",
    "sweep_cavity_energy",
    "sweep_detuning_features",
    "DispersionData",
    "DispersionRecord",
    "FitResult",
    "fit_coupled_oscillator",
    "fit_triplet_coupling",
    "minimize",
    "read_dispersion_csv",
    "read_feature_csv",
    "device_preset",
    "rate_preset",
    "__version__",
]
