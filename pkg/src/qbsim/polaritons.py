"""Single-excitation eigenanalysis.

Polariton branch energies and diabatic characters of the four-level
{photon, donor S1, acceptor S1, acceptor T1} block, lower-polariton
detuning against the bare triplet, hybrid-triplet effective lifetime,
and cavity-energy resonance finding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousLabelingError,
    DomainError,
    ResonanceNotBracketedError,
)
from .model import DeviceParams, cavity_energy

# Basis order of the single-excitation block.
SINGLE_EXCITATION_STATES = ("photon", "donor_s1", "acceptor_s1", "acceptor_t1")

# Branch labels, `TT` being the triplet-dominated branch.
BRANCH_LABELS = ("LP", "MP", "UP", "TT")

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class PolaritonBranch:
    """One eigenbranch: energy, diabatic weights, and its label."""

    label: str
    energy: float
    character: np.ndarray  # weights over SINGLE_EXCITATION_STATES, sum 1

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


@dataclass(frozen=True)
class DetuningReport:
    """Lower-polariton energy relative to the bare triplet."""

    e_lp: float
    e_t1: float
    delta_e: float


def single_excitation_hamiltonian(device: DeviceParams, theta_deg: float = 0.0) -> np.ndarray:
    """4x4 real symmetric block in the SINGLE_EXCITATION_STATES order."""
    wc = cavity_energy(device, theta_deg)
    return np.array(
        [
            [wc, device.j_d, device.j_a, device.j_t],
            [device.j_d, device.omega_d, 0.0, 0.0],
            [device.j_a, 0.0, device.omega_a, 0.0],
            [device.j_t, 0.0, 0.0, device.omega_t],
        ]
    )


def polariton_branches(device: DeviceParams, theta_deg: float = 0.0):
    """Diagonalize the single-excitation block and label the four branches.

    The branch with maximal triplet weight is labeled TT; the remaining
    three are LP/MP/UP by ascending energy.  Eigenvalues closer than
    DEGENERACY_TOL make the labeling ambiguous and raise.

    Returns a tuple of four PolaritonBranch ordered (LP, MP, UP, TT).
    """
    h = single_excitation_hamiltonian(device, theta_deg)
    evals, vecs = np.linalg.eigh(h)

    gaps = np.diff(evals)
    if np.any(gaps < DEGENERACY_TOL):
        k = int(np.argmin(gaps))
        raise AmbiguousLabelingError(
            f"eigenvalues {evals[k]:.12g} and {evals[k + 1]:.12g} are degenerate "
            f"within {DEGENERACY_TOL}",
            candidates=(evals[k], evals[k + 1]),
        )

    weights = vecs**2  # columns are branches
    t_idx = int(np.argmax(weights[3]))
    rest = [k for k in range(4) if k != t_idx]  # already energy-ascending

    branches = [
        PolaritonBranch(label, float(evals[k]), weights[:, k].copy())
        for label, k in zip(("LP", "MP", "UP"), rest)
    ]
    branches.append(PolaritonBranch("TT", float(evals[t_idx]), weights[:, t_idx].copy()))
    return tuple(branches)


def branch_by_label(branches, label: str) -> PolaritonBranch:
    for b in branches:
        if b.label == label:
            return b
    raise DomainError(f"unknown branch label {label!r}; expected one of {BRANCH_LABELS}")


def detuning(device: DeviceParams, theta_deg: float = 0.0) -> DetuningReport:
    """LP energy minus bare triplet energy, with the LP taken at j_t = 0.

    The detuning axis of the feature analysis is defined against the
    triplet-decoupled lower polariton, so a finite j_t elsewhere does not
    move the reference.
    """
    bare = device.replace(j_t=0.0)
    e_lp = branch_by_label(polariton_branches(bare, theta_deg), "LP").energy
    return DetuningReport(e_lp=e_lp, e_t1=device.omega_t, delta_e=e_lp - device.omega_t)


def effective_triplet_lifetime(p_t: float, tau_t: float, p_p: float, tau_p: float) -> float:
    """Population-weighted lifetime of a hybridized triplet, p_t*tau_t + p_p*tau_p.

    Fractions must be non-negative with p_t + p_p <= 1 (small slack);
    lifetimes must be positive.  Units follow the inputs.
    """
    if p_t < 0 or p_p < 0:
        raise DomainError(f"population fractions must be >= 0, got ({p_t!r}, {p_p!r})")
    if p_t + p_p > 1.0 + 1e-9:
        raise DomainError(f"population fractions sum to {p_t + p_p!r} > 1")
    if tau_t <= 0 or tau_p <= 0:
        raise DomainError(f"lifetimes must be > 0, got ({tau_t!r}, {tau_p!r})")
    return p_t * tau_t + p_p * tau_p


def find_resonance(
    device: DeviceParams,
    branch: str,
    target_energy: float,
    omega_range: tuple[float, float],
    steps: int = 50,
    theta_deg: float = 0.0,
    tol: float = 1e-6,
    spectator_coupling_max: float = 1e-3,
) -> float:
    """Cavity bare energy omega_c0 placing a branch at a target energy.

    The search runs on the triplet-decoupled block (j_t = 0) with
    uncoupled emitters removed.  Eigenvalue interlacing makes a coupled
    emitter's bare line an impassable bound for the outer branches, so
    an emitter whose bare energy pins the requested branch away from the
    target is treated as a spectator and removed as well, provided its
    coupling does not exceed `spectator_coupling_max`.  The classic case
    is asking for the upper branch at the absorption energy of a weakly
    coupled emitter: the labeled branch anticrosses the target there,
    while the reduced cavity-donor branch crosses it cleanly.  Labels
    ascend on the reduced block: LP, then MP when two emitters remain,
    then UP.

    Scans omega_c0 over `omega_range`, then bisects the sign change of
    E_branch(omega_c0) - target down to `tol`.

    Raises ResonanceNotBracketedError when the target is unreachable
    (blocked by a strongly coupled emitter, or no sign change on the
    grid) and DomainError for bad ranges or labels.
    """
    lo, hi = float(omega_range[0]), float(omega_range[1])
    if not hi > lo:
        raise DomainError(f"omega_range must be increasing, got ({lo!r}, {hi!r})")
    if steps < 3:
        raise DomainError(f"need at least 3 scan steps, got {steps}")
    if branch not in ("LP", "MP", "UP"):
        raise DomainError(f"resonance search needs a polariton label LP/MP/UP, got {branch!r}")

    emitters = [
        (device.omega_d, device.j_d, "donor"),
        (device.omega_a, device.j_a, "acceptor"),
    ]
    emitters = sorted((e for e in emitters if e[1] > 0.0), key=lambda e: e[0])

    def blocking_index():
        if not emitters:
            return None
        if branch == "LP" and target_energy >= emitters[0][0]:
            return 0
        if branch == "UP" and target_energy <= emitters[-1][0]:
            return len(emitters) - 1
        if branch == "MP" and len(emitters) >= 2:
            if target_energy <= emitters[0][0]:
                return 0
            if target_energy >= emitters[-1][0]:
                return len(emitters) - 1
        return None

    while (k := blocking_index()) is not None:
        omega_e, j_e, name = emitters[k]
        if j_e > spectator_coupling_max:
            side = "above" if branch == "LP" else "below"
            raise ResonanceNotBracketedError(
                f"{branch} is pinned {side} the {name} line at {omega_e} eV "
                f"(coupling {j_e} eV) and cannot reach {target_energy} eV"
            )
        del emitters[k]

    if branch == "MP" and len(emitters) < 2:
        raise DomainError(f"no middle branch: only {len(emitters)} coupled emitter(s) remain")

    level = {"LP": 0, "MP": 1, "UP": len(emitters)}[branch]
    bare = np.array([e[0] for e in emitters])
    coup = np.array([e[1] for e in emitters])

    def f(w0: float) -> float:
        dev = device.replace(omega_c0=w0)
        h = np.zeros((len(emitters) + 1, len(emitters) + 1))
        h[0, 0] = cavity_energy(dev, theta_deg)
        h[0, 1:] = coup
        h[1:, 0] = coup
        h[1:, 1:] = np.diag(bare)
        return float(np.linalg.eigvalsh(h)[level]) - target_energy

    grid = np.linspace(lo, hi, steps)
    vals = np.array([f(w) for w in grid])

    crossings = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
    if len(crossings) == 0:
        raise ResonanceNotBracketedError(
            f"E_{branch} - {target_energy} does not change sign over ({lo}, {hi}); "
            f"closest approach {float(np.min(np.abs(vals))):.3g} eV"
        )

    k0 = int(crossings[0])
    if vals[k0] == 0.0:
        return float(grid[k0])
    if vals[k0 + 1] == 0.0:
        return float(grid[k0 + 1])

    a, b = grid[k0], grid[k0 + 1]
    fa = f(a)
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return float(m)
        if (fa < 0) == (fm < 0):
            a, fa = m, fm
        else:
            b = m
    return float(0.5 * (a + b))
