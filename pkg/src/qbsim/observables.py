"""Populations, emission proxies, battery figures of merit, and integration.

Everything here is a pure transformation of states, trajectories, or
device/rate parameters; nothing touches the propagator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    FitDomainError,
    IncompleteScenarioError,
    InsufficientDataError,
)
from .hilbert import CompositeBasis, DensityMatrix, level_projector, photon_number
from .model import EV_TO_JOULE, HBAR_EV_NS, DeviceParams, RateParams
from .polaritons import single_excitation_hamiltonian

# RMS log-residual above which a decay series is flagged non-single-exponential.
SINGLE_EXP_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class PopulationRecord:
    """Diagonal observables of one state at one time (ns)."""

    t: float
    p_ground: float
    mean_photons: float
    p_donor_s1: float
    p_acceptor_s1: float
    p_acceptor_t1: float


@dataclass(frozen=True)
class EnergyFigures:
    """Battery figures of merit: peak charging power (eV/ns), stored
    energy density at end of charge (eV), and self-discharge time (ns)."""

    charging_power: float
    stored_density: float
    self_discharge_time: float


@dataclass(frozen=True)
class FeatureRecord:
    """Relative emission features of one device, normalized to a reference."""

    delta_e: float
    rel_fluorescence_intensity: float
    rel_sharpness: float
    rel_phosphorescence_rate: float


@dataclass(frozen=True)
class DecayFit:
    """Single-exponential fit of a positive decay series."""

    rate: float        # 1/ns
    amplitude: float
    residual: float    # RMS residual of log(value)
    single_exponential: bool


@dataclass(frozen=True)
class LossyBranch:
    """Complex eigenbranch of the loss-dressed single-excitation block."""

    label: str
    energy: float      # eV, Re(eigenvalue)
    fwhm: float        # eV, -2 Im(eigenvalue)
    character: np.ndarray

    @property
    def w_cavity(self) -> float:
        return float(self.character[0])

    @property
    def w_donor(self) -> float:
        return float(self.character[1])

    @property
    def w_acceptor(self) -> float:
        return float(self.character[2])

    @property
    def w_triplet(self) -> float:
        return float(self.character[3])


def populations(rho: DensityMatrix, basis: CompositeBasis | None = None, t: float = 0.0) -> PopulationRecord:
    """Projector expectations and the mean photon number of one state."""
    basis = basis or rho.basis
    ground = np.zeros((basis.dim, basis.dim))
    g = basis.index(0, "S0", "S0")
    ground[g, g] = 1.0
    return PopulationRecord(
        t=float(t),
        p_ground=rho.expectation(ground),
        mean_photons=rho.expectation(photon_number(basis)),
        p_donor_s1=rho.expectation(level_projector(basis, "donor", "S1")),
        p_acceptor_s1=rho.expectation(level_projector(basis, "acceptor", "S1")),
        p_acceptor_t1=rho.expectation(level_projector(basis, "acceptor", "T1")),
    )


def trajectory_populations(traj) -> list[PopulationRecord]:
    return [populations(s, t=t) for t, s in zip(traj.times, traj.states)]


def stored_energy_density(rho: DensityMatrix, device: DeviceParams, basis: CompositeBasis | None = None) -> float:
    """Energy stored per acceptor, omega_t times the triplet population (eV)."""
    basis = basis or rho.basis
    return device.omega_t * rho.expectation(level_projector(basis, "acceptor", "T1"))


def volumetric_energy_density(p_t1: float, e_t1: float, rho_t1: float) -> float:
    """p_T1 * E_T1 * (triplet site density), in eV per cm^3."""
    if not 0.0 <= p_t1 <= 1.0:
        raise DomainError(f"p_t1 must be in [0, 1], got {p_t1!r}")
    if e_t1 <= 0 or rho_t1 <= 0:
        raise DomainError(f"e_t1 and rho_t1 must be > 0, got ({e_t1!r}, {rho_t1!r})")
    return p_t1 * e_t1 * rho_t1


def battery_capacity(e_t1: float, n_t1: float) -> dict:
    """Total capacity of n_t1 charged triplet sites, in eV and watt-hours."""
    if e_t1 <= 0:
        raise DomainError(f"e_t1 must be > 0, got {e_t1!r}")
    if n_t1 < 0:
        raise DomainError(f"n_t1 must be >= 0, got {n_t1!r}")
    ev_total = e_t1 * n_t1
    return {"ev_total": ev_total, "watt_hours": ev_total * EV_TO_JOULE / 3600.0}


def fit_exponential_decay(times, values, window: tuple[float, float]) -> DecayFit:
    """Least-squares single-exponential fit of log(value) over a time window.

    Requires at least 5 strictly positive samples inside the window.  The
    returned rate is clipped at zero (a constant series fits rate 0); a large
    log-residual marks the series as not single-exponential.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape:
        raise DomainError(f"times and values differ in shape: {t.shape} vs {v.shape}")
    a, b = window
    mask = (t >= a) & (t <= b)
    if int(mask.sum()) < 5:
        raise InsufficientDataError(f"need >= 5 samples in window [{a}, {b}], got {int(mask.sum())}")
    tw, vw = t[mask], v[mask]
    if np.any(vw <= 0):
        raise FitDomainError("decay fit requires positive values inside the window")

    slope, intercept = np.polyfit(tw, np.log(vw), 1)
    resid = np.log(vw) - (slope * tw + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    return DecayFit(
        rate=max(0.0, -float(slope)),
        amplitude=float(np.exp(intercept)),
        residual=rms,
        single_exponential=rms <= SINGLE_EXP_RESIDUAL_TOL,
    )


def trapezoid_integral(xs, fs, a: float, b: float) -> float:
    """Trapezoid rule over [a, b] on sampled data, endpoints interpolated.

    Exact on linear functions, additive over adjacent windows, linear in f.
    """
    x = np.asarray(xs, dtype=float)
    f = np.asarray(fs, dtype=float)
    if x.ndim != 1 or x.shape != f.shape or len(x) < 2:
        raise DomainError("need matching 1-d arrays with at least 2 samples")
    if np.any(np.diff(x) <= 0):
        raise DomainError("sample abscissae must be strictly increasing")
    if not a < b:
        raise DomainError(f"window must satisfy a < b, got ({a!r}, {b!r})")
    if a < x[0] or b > x[-1]:
        raise DomainError(f"window [{a}, {b}] outside sampled range [{x[0]}, {x[-1]}]")

    fa = np.interp(a, x, f)
    fb = np.interp(b, x, f)
    inner = (x > a) & (x < b)
    nodes = np.concatenate(([a], x[inner], [b]))
    vals = np.concatenate(([fa], f[inner], [fb]))
    return float(np.sum(0.5 * np.diff(nodes) * (vals[1:] + vals[:-1])))


def radiative_flux(rho: DensityMatrix, rates: RateParams, basis: CompositeBasis | None = None) -> float:
    """Emitted photon flux from the radiative channels (1/ns):
    gamma_c <a+a> + gamma_d p_D,S1 + gamma_a p_A,S1."""
    basis = basis or rho.basis
    return (
        rates.gamma_c * rho.expectation(photon_number(basis))
        + rates.gamma_d * rho.expectation(level_projector(basis, "donor", "S1"))
        + rates.gamma_a * rho.expectation(level_projector(basis, "acceptor", "S1"))
    )


def lossy_branches(device: DeviceParams, rates: RateParams, theta_deg: float = 0.0):
    """Branches of the loss-dressed single-excitation block.

    The Hermitian 4x4 acquires -i/2 * hbar * diag(gamma_c, gamma_d,
    gamma_a, gamma_ic); eigenvalue imaginary parts give Lorentzian
    FWHM linewidths.  Labels follow the polariton convention (TT to the
    branch with maximal triplet weight, LP/MP/UP ascending in energy).

    Returns a dict label -> LossyBranch.
    """
    h = single_excitation_hamiltonian(device, theta_deg).astype(complex)
    widths = np.array([rates.gamma_c, rates.gamma_d, rates.gamma_a, rates.gamma_ic])
    h -= 0.5j * HBAR_EV_NS * np.diag(widths)

    evals, vecs = np.linalg.eig(h)
    order = np.argsort(evals.real)
    evals, vecs = evals[order], vecs[:, order]
    weights = np.abs(vecs) ** 2
    weights /= weights.sum(axis=0)

    t_idx = int(np.argmax(weights[3]))
    rest = [k for k in range(4) if k != t_idx]
    out = {}
    for label, k in zip(("LP", "MP", "UP"), rest):
        out[label] = LossyBranch(label, float(evals[k].real), float(-2.0 * evals[k].imag), weights[:, k].copy())
    out["TT"] = LossyBranch("TT", float(evals[t_idx].real), float(-2.0 * evals[t_idx].imag), weights[:, t_idx].copy())
    return out


def charging_metrics(traj, device: DeviceParams, basis: CompositeBasis | None = None) -> EnergyFigures:
    """Battery figures from a charge-then-relax trajectory.

    Peak charging power is the largest centered finite difference of
    omega_t * p_T1 over pump-on samples; stored density is read at the
    last pump-on sample; the self-discharge time is the inverse rate of
    an exponential fit over the pump-off tail.
    """
    phases = traj.metadata.get("phases")
    phase_index = traj.metadata.get("phase_index")
    if phases is None or phase_index is None:
        raise IncompleteScenarioError("trajectory lacks phase metadata; run it through run_scenario")
    pump_on = np.array([phases[k]["pump"] for k in phase_index], dtype=bool)
    if not pump_on.any() or pump_on.all():
        raise IncompleteScenarioError("need both pump-on and pump-off phases for charging metrics")

    recs = trajectory_populations(traj)
    p_t = np.array([r.p_acceptor_t1 for r in recs])
    t = np.asarray(traj.times, dtype=float)
    energy = device.omega_t * p_t

    t_on, e_on = t[pump_on], energy[pump_on]
    if len(t_on) < 3:
        raise InsufficientDataError(f"need >= 3 pump-on samples, got {len(t_on)}")
    power = float(np.max(np.gradient(e_on, t_on)))

    t_off, p_off = t[~pump_on], p_t[~pump_on]
    if np.all(p_off < 1e-15):
        discharge_time = math.inf
    else:
        fit = fit_exponential_decay(t_off, np.maximum(p_off, 1e-300), (t_off[0], t_off[-1]))
        discharge_time = math.inf if fit.rate == 0.0 else 1.0 / fit.rate

    return EnergyFigures(
        charging_power=max(0.0, power),
        stored_density=float(e_on[-1]),
        self_discharge_time=discharge_time,
    )
