"""Scripted experiment scenarios.

Charge/relax schedules over phase lists (pump on/off, cavity closed/open),
cavity-energy resonance sweeps probed at a fixed time, and the
detuning-series emission-feature sweep.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory, build_liouvillian, propagate, steady_state
from .errors import DomainError, IncompleteScenarioError, NumericalFailureError
from .hilbert import CompositeBasis, DensityMatrix, level_projector, photon_number
from .model import HBAR_EV_NS, DeviceParams, RateParams, build_jc_hamiltonian
from .observables import FeatureRecord, lossy_branches, radiative_flux
from .polaritons import detuning, effective_triplet_lifetime, polariton_branches

# Default per-phase sampling windows (ns): pump-on grids resolve the fast
# polariton rise, relaxation grids straddle polariton and IC timescales.
PUMP_GRID_START = 1e-3
RELAX_GRID_START = 1e-1
GRID_POINTS = 61


@dataclass
class Phase:
    """One schedule segment: fixed generator for `duration` ns.

    cavity_open zeroes all three couplings while keeping every loss
    channel; pump False zeroes gamma_p.  `grid` holds sample times
    relative to the phase start, strictly increasing in (0, duration].
    """

    duration: float
    pump: bool
    cavity_open: bool = False
    label: str = ""
    grid: np.ndarray | None = None

    def __post_init__(self):
        if not self.duration > 0:
            raise DomainError(f"phase duration must be > 0, got {self.duration!r}")
        if self.grid is not None:
            g = np.asarray(self.grid, dtype=float)
            if g.ndim != 1 or len(g) == 0 or np.any(np.diff(g) <= 0):
                raise DomainError("phase grid must be 1-d and strictly increasing")
            if g[0] <= 0 or g[-1] > self.duration * (1 + 1e-12):
                raise DomainError("phase grid must lie in (0, duration]")
            self.grid = g


@dataclass
class Scenario:
    """A device, its rates, and an ordered phase schedule."""

    device: DeviceParams
    rates: RateParams
    phases: list[Phase]
    theta_deg: float = 0.0
    n_max: int = 2

    def __post_init__(self):
        if len(self.phases) == 0:
            raise DomainError("scenario needs at least one phase")

    @property
    def total_duration(self) -> float:
        return float(sum(p.duration for p in self.phases))


@dataclass
class SweepResult:
    """Per-grid-point triplet population at the probe time plus branch energies."""

    parameter: str
    grid: np.ndarray
    p_t1: np.ndarray
    branch_energies: dict[str, np.ndarray]  # keys LP, MP, UP, TT
    probe_time: float

    @property
    def argmax_omega(self) -> float:
        return float(self.grid[int(np.argmax(self.p_t1))])


@dataclass(frozen=True)
class FeatureTable:
    """Relative emission features across a device series."""

    records: tuple[FeatureRecord, ...]
    j_t: float
    reference: int


def default_phase_grid(duration: float, pump: bool, points: int = GRID_POINTS) -> np.ndarray:
    """Log-spaced sample times ending exactly at the phase duration."""
    start = PUMP_GRID_START if pump else RELAX_GRID_START
    if duration <= start:
        return np.array([duration])
    g = np.geomspace(start, duration, points)
    g[-1] = duration
    return g


def charge_relax_scenario(
    device: DeviceParams,
    rates: RateParams,
    charge_ns: float,
    relax_ns: float,
    relax_open: bool = False,
    theta_deg: float = 0.0,
    n_max: int = 2,
) -> Scenario:
    """Standard two-phase schedule: pump for charge_ns, then relax."""
    return Scenario(
        device=device,
        rates=rates,
        phases=[
            Phase(duration=charge_ns, pump=True, label="charge"),
            Phase(duration=relax_ns, pump=False, cavity_open=relax_open, label="relax"),
        ],
        theta_deg=theta_deg,
        n_max=n_max,
    )


def _phase_generator(scenario: Scenario, phase: Phase, basis: CompositeBasis):
    device = scenario.device
    if phase.cavity_open:
        device = device.replace(j_d=0.0, j_a=0.0, j_t=0.0)
    rates = scenario.rates if phase.pump else scenario.rates.replace(gamma_p=0.0)
    h = build_jc_hamiltonian(device, basis, scenario.theta_deg)
    return build_liouvillian(h, rates, basis)


def run_scenario(scenario: Scenario) -> Trajectory:
    """Propagate through the schedule, carrying the state across phases.

    Returns one concatenated trajectory on absolute times, with per-sample
    phase indices and labels in the metadata.
    """
    basis = CompositeBasis(scenario.n_max)
    rho = DensityMatrix.ground_state(basis)

    times, states, phase_index = [0.0], [rho], [0]
    phase_meta = []
    t0 = 0.0
    for k, phase in enumerate(scenario.phases):
        label = phase.label or f"phase{k}"
        grid = phase.grid if phase.grid is not None else default_phase_grid(phase.duration, phase.pump)
        if not np.isclose(grid[-1], phase.duration, rtol=1e-12, atol=0.0):
            grid = np.append(grid, phase.duration)

        liou = _phase_generator(scenario, phase, basis)
        try:
            leg = propagate(liou, rho, grid)
        except NumericalFailureError as exc:
            raise NumericalFailureError(f"phase {k} ({label}): {exc}") from exc

        times.extend(t0 + grid)
        states.extend(leg.states)
        phase_index.extend([k] * len(grid))
        phase_meta.append(
            {
                "label": label,
                "pump": phase.pump,
                "cavity_open": phase.cavity_open,
                "t_start": t0,
                "t_end": t0 + phase.duration,
            }
        )
        rho = leg.states[-1]
        t0 += phase.duration

    idx = np.asarray(phase_index)
    return Trajectory(
        times=np.asarray(times),
        states=states,
        metadata={
            "phases": phase_meta,
            "phase_index": idx,
            "phase_labels": [phase_meta[k]["label"] for k in idx],
            "theta_deg": scenario.theta_deg,
            "n_max": scenario.n_max,
            "device": scenario.device,
            "rates": scenario.rates,
        },
    )


def _state_at(scenario: Scenario, t: float, basis: CompositeBasis) -> DensityMatrix:
    """State at absolute time t, walking the schedule phase by phase."""
    rho = DensityMatrix.ground_state(basis)
    t0 = 0.0
    for phase in scenario.phases:
        liou = _phase_generator(scenario, phase, basis)
        if t <= t0 + phase.duration or phase is scenario.phases[-1]:
            return propagate(liou, rho, [t - t0]).states[-1]
        rho = propagate(liou, rho, [phase.duration]).states[-1]
        t0 += phase.duration
    return rho


def _sweep_point(args) -> tuple[float, dict[str, float]]:
    scenario, probe_time, omega0 = args
    swept = Scenario(
        device=scenario.device.replace(omega_c0=omega0),
        rates=scenario.rates,
        phases=scenario.phases,
        theta_deg=scenario.theta_deg,
        n_max=scenario.n_max,
    )
    basis = CompositeBasis(swept.n_max)
    rho = _state_at(swept, probe_time, basis)
    p_t1 = rho.expectation(level_projector(basis, "acceptor", "T1"))
    energies = {
        b.label: b.energy for b in polariton_branches(swept.device, swept.theta_deg)
    }
    return p_t1, energies


def sweep_cavity_energy(
    template: Scenario,
    omega_grid,
    probe_time: float,
    jobs: int = 1,
) -> SweepResult:
    """Rerun the template at each cavity bare energy, probing p_T1.

    The grid must be strictly increasing and the probe time must lie
    within the schedule span.  Ten or more points are recommended for
    resonance identification; degenerate grids are allowed and reduce
    to a single simulation.
    """
    grid = np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise DomainError("omega grid must be a non-empty 1-d array")
    if len(grid) > 1 and np.any(np.diff(grid) <= 0):
        raise DomainError("omega grid must be strictly increasing")
    if not 0.0 < probe_time <= template.total_duration * (1 + 1e-12):
        raise DomainError(
            f"probe time {probe_time!r} outside the schedule span (0, {template.total_duration}]"
        )

    tasks = [(template, probe_time, w) for w in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]

    p_t1 = np.array([r[0] for r in results])
    branch_energies = {
        label: np.array([r[1][label] for r in results]) for label in ("LP", "MP", "UP", "TT")
    }
    return SweepResult(
        parameter="omega_c0",
        grid=grid,
        p_t1=p_t1,
        branch_energies=branch_energies,
        probe_time=probe_time,
    )


def sweep_detuning_features(
    devices,
    rates: RateParams,
    j_t: float,
    reference: int = 0,
    theta_deg: float = 0.0,
    n_max: int = 2,
) -> FeatureTable:
    """Relative emission features across a device series at one j_t.

    Per device: detuning of the triplet-decoupled LP, then three proxies
    normalized to the reference device.

    - fluorescence intensity: pump-on steady radiative flux weighted by
      the LP bright fraction (1 - triplet weight), so oscillator strength
      ceded to the triplet dims the fluorescent branch;
    - sharpness: inverse Lorentzian FWHM of the loss-dressed LP;
    - phosphorescence rate: inverse population-weighted lifetime, with
      the triplet/bright steady populations normalized to fractions, the
      bare triplet living 1/gamma_ic and the bright manifold living one
      LP linewidth.
    """
    devices = list(devices)
    if len(devices) < 2:
        raise DomainError(f"need at least 2 devices, got {len(devices)}")
    if not 0 <= reference < len(devices):
        raise DomainError(f"reference index {reference} out of range")
    if j_t < 0:
        raise DomainError(f"j_t must be >= 0, got {j_t!r}")
    if rates.gamma_ic <= 0:
        raise DomainError("feature sweep needs gamma_ic > 0 for a finite triplet lifetime")

    basis = CompositeBasis(n_max)
    tau_t = 1.0 / rates.gamma_ic

    raw = []
    for dev in devices:
        dev_j = dev.replace(j_t=j_t)
        delta = detuning(dev_j, theta_deg).delta_e

        lp = lossy_branches(dev_j, rates, theta_deg)["LP"]
        sharpness = 1.0 / lp.fwhm
        tau_p = HBAR_EV_NS / lp.fwhm
        bright = 1.0 - lp.w_triplet

        liou = build_liouvillian(build_jc_hamiltonian(dev_j, basis, theta_deg), rates, basis)
        ss = steady_state(liou)
        p_t = ss.expectation(level_projector(basis, "acceptor", "T1"))
        p_bright = (
            ss.expectation(photon_number(basis))
            + ss.expectation(level_projector(basis, "donor", "S1"))
            + ss.expectation(level_projector(basis, "acceptor", "S1"))
        )
        fluor = radiative_flux(ss, rates) * bright

        total = p_t + p_bright
        if total <= 0:
            phos_rate = 0.0
        else:
            tau = effective_triplet_lifetime(p_t / total, tau_t, p_bright / total, tau_p)
            phos_rate = 1.0 / tau
        raw.append((delta, fluor, sharpness, phos_rate))

    ref = raw[reference]
    records = tuple(
        FeatureRecord(
            delta_e=delta,
            rel_fluorescence_intensity=fluor / ref[1],
            rel_sharpness=sharp / ref[2],
            rel_phosphorescence_rate=phos / ref[3],
        )
        for delta, fluor, sharp, phos in raw
    )
    return FeatureTable(records=records, j_t=j_t, reference=reference)
