"""Parameter estimation.

A generic bounded Nelder-Mead wrapper, the three-coupled-oscillator fit
of angle-resolved dispersion data, and the one-dimensional triplet
coupling fit against relative emission features.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import Bounds
from scipy.optimize import minimize as _scipy_minimize

from .errors import (
    ConfigError,
    DomainError,
    InsufficientDataError,
    ObjectiveEvaluationError,
    UnderdeterminedFitError,
)
from .model import DeviceParams, RateParams, cavity_energy
from .observables import FeatureRecord
from .polaritons import single_excitation_hamiltonian
from .protocols import FeatureTable, sweep_detuning_features

FREE_DISPERSION_PARAMS = ("omega_c0", "n_eff", "j_d", "j_a")

_DISPERSION_BOUNDS = {
    "omega_c0": (0.1, 10.0),
    "n_eff": (1.0 + 1e-6, 10.0),
    "j_d": (0.0, 2.0),
    "j_a": (0.0, 2.0),
}


@dataclass
class FitResult:
    """Outcome of one minimization."""

    params: dict
    objective: float
    iterations: int
    converged: bool
    warning: str | None = None
    residuals: dict = field(default_factory=dict)
    device: DeviceParams | None = None

    @property
    def x(self) -> np.ndarray:
        return np.array(list(self.params.values()), dtype=float)


@dataclass(frozen=True)
class DispersionRecord:
    """One measured branch energy at one angle; empty branch means untagged."""

    theta_deg: float
    branch: str | None
    energy: float
    weight: float = 1.0


@dataclass(frozen=True)
class DispersionData:
    """Angle-resolved branch energies for the coupled-oscillator fit."""

    records: tuple[DispersionRecord, ...]

    def __post_init__(self):
        for r in self.records:
            if r.energy <= 0:
                raise DomainError(f"branch energies must be > 0, got {r.energy!r}")
            if r.branch not in (None, "LP", "MP", "UP"):
                raise DomainError(f"unknown branch tag {r.branch!r}")

    @property
    def angles(self) -> tuple[float, ...]:
        return tuple(sorted({r.theta_deg for r in self.records}))


def minimize(
    objective,
    x0,
    bounds=None,
    names=None,
    max_iter: int = 2000,
    x_tol: float = 1e-9,
    f_tol: float = 1e-12,
) -> FitResult:
    """Bounded Nelder-Mead descent.

    Raises ObjectiveEvaluationError when the objective goes non-finite,
    and never returns a point worse than the start.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if bounds is not None:
        for xi, (lo, hi) in zip(x0, bounds):
            if not lo <= xi <= hi:
                raise DomainError(f"start {xi!r} outside bounds ({lo!r}, {hi!r})")

    def wrapped(x):
        v = float(objective(np.asarray(x, dtype=float)))
        if not math.isfinite(v):
            raise ObjectiveEvaluationError(point=np.asarray(x, dtype=float), value=v)
        return v

    f0 = wrapped(x0)
    res = _scipy_minimize(
        wrapped,
        x0,
        method="Nelder-Mead",
        bounds=Bounds(*zip(*bounds)) if bounds is not None else None,
        options={"maxiter": max_iter, "xatol": x_tol, "fatol": f_tol},
    )
    x_best, f_best = (res.x, float(res.fun)) if res.fun <= f0 else (x0, f0)

    keys = list(names) if names is not None else [f"x{i}" for i in range(len(x0))]
    return FitResult(
        params=dict(zip(keys, np.atleast_1d(x_best).tolist())),
        objective=f_best,
        iterations=int(res.nit),
        converged=bool(res.success),
    )


def _model_branch_energies(device: DeviceParams, theta_deg: float) -> dict[str, float]:
    """Ascending eigenvalues of the triplet-decoupled 3x3 block."""
    h = single_excitation_hamiltonian(device.replace(j_t=0.0), theta_deg)[:3, :3]
    lp, mp, up = np.linalg.eigvalsh(h)
    return {"LP": lp, "MP": mp, "UP": up}


def fit_coupled_oscillator(
    data: DispersionData,
    init: DeviceParams,
    free=("omega_c0", "j_d", "j_a"),
    max_iter: int = 4000,
) -> FitResult:
    """Fit the three-coupled-oscillator dispersion model to tagged branch data.

    The donor and acceptor energies stay frozen at their spectroscopic
    values in `init`; `free` selects among omega_c0, n_eff, j_d, j_a.
    Residuals are matched by branch tag; untagged records fall back to
    nearest-energy matching with a warning.
    """
    free = tuple(free)
    if len(free) == 0 or len(set(free)) != len(free):
        raise DomainError(f"free parameter list must be non-empty and unique, got {free!r}")
    for name in free:
        if name not in FREE_DISPERSION_PARAMS:
            raise DomainError(f"{name!r} is not a fittable dispersion parameter {FREE_DISPERSION_PARAMS}")
    if len(data.angles) < len(free):
        raise UnderdeterminedFitError(
            f"{len(data.angles)} distinct angles cannot determine {len(free)} parameters"
        )

    if any(r.branch is None for r in data.records):
        warnings.warn("untagged dispersion records are matched by nearest energy", stacklevel=2)

    # Angle-resolved scans carry hundreds of rows, so the residual is
    # evaluated on stacked 3x3 blocks (one batched eigvalsh per call)
    # instead of looping records in Python.
    angles = data.angles
    angle_pos = {t: i for i, t in enumerate(angles)}
    branch_col = {"LP": 0, "MP": 1, "UP": 2}
    angle_ix = np.array([angle_pos[r.theta_deg] for r in data.records])
    branch_ix = np.array([-1 if r.branch is None else branch_col[r.branch] for r in data.records])
    energies = np.array([r.energy for r in data.records])
    weights = np.array([r.weight for r in data.records])
    tagged = branch_ix >= 0

    def objective(x):
        device = init.replace(**dict(zip(free, x)))
        h = np.zeros((len(angles), 3, 3))
        h[:, 0, 0] = [cavity_energy(device, t) for t in angles]
        h[:, 1, 1] = device.omega_d
        h[:, 2, 2] = device.omega_a
        h[:, 0, 1] = h[:, 1, 0] = device.j_d
        h[:, 0, 2] = h[:, 2, 0] = device.j_a
        levels = np.linalg.eigvalsh(h)
        e_model = np.empty(len(energies))
        e_model[tagged] = levels[angle_ix[tagged], branch_ix[tagged]]
        if not tagged.all():
            cand = levels[angle_ix[~tagged]]
            pick = np.abs(cand - energies[~tagged, None]).argmin(axis=1)
            e_model[~tagged] = cand[np.arange(len(cand)), pick]
        return float(np.sum(weights * (e_model - energies) ** 2))

    x0 = [getattr(init, name) for name in free]
    bounds = [_DISPERSION_BOUNDS[name] for name in free]
    result = minimize(objective, x0, bounds=bounds, names=free, max_iter=max_iter)
    result.device = init.replace(**result.params)
    result.residuals = {"total_squared": result.objective}
    return result


def fit_triplet_coupling(
    features,
    devices,
    rates: RateParams,
    j_t_bounds: tuple[float, float] = (1e-4, 0.02),
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0),
    prescan_points: int = 50,
    reference: int = 0,
    theta_deg: float = 0.0,
    n_max: int = 2,
    max_iter: int = 200,
) -> FitResult:
    """Estimate the scalar triplet-cavity coupling from relative features.

    Matches measured relative (fluorescence, sharpness, phosphorescence
    rate) against the model feature sweep over the same device series.
    A log-spaced grid pre-scan seeds a bounded 1-d simplex, avoiding the
    flat objective near zero coupling.
    """
    records = features.records if isinstance(features, FeatureTable) else tuple(features)
    lo, hi = j_t_bounds
    if not 0 < lo < hi:
        raise DomainError(f"degenerate j_t bounds ({lo!r}, {hi!r})")
    if len(records) != len(devices):
        raise DomainError(f"{len(records)} feature records for {len(devices)} devices")
    if len(records) < 3:
        raise InsufficientDataError(f"need features at >= 3 detunings, got {len(records)}")
    deltas = np.array([r.delta_e for r in records])
    if not (np.any(deltas > 0) and np.any(deltas < 0)) and np.min(np.abs(deltas)) > 0.05:
        raise InsufficientDataError(
            "detunings neither change sign nor approach zero; j_t is not identifiable"
        )

    measured = np.array(
        [
            [r.rel_fluorescence_intensity, r.rel_sharpness, r.rel_phosphorescence_rate]
            for r in records
        ]
    )
    warning = None
    if float(np.ptp(measured, axis=0).max()) < 1e-12:
        warning = "unidentifiable: measured features are flat across the detuning series"

    w = np.asarray(weights, dtype=float)

    def objective(x):
        table = sweep_detuning_features(
            devices, rates, j_t=float(x[0]), reference=reference,
            theta_deg=theta_deg, n_max=n_max,
        )
        model = np.array(
            [
                [r.rel_fluorescence_intensity, r.rel_sharpness, r.rel_phosphorescence_rate]
                for r in table.records
            ]
        )
        return float(np.sum(w * (model - measured) ** 2))

    scan = np.geomspace(lo, hi, prescan_points)
    scan_vals = np.array([objective([j]) for j in scan])
    seed = scan[int(np.argmin(scan_vals))]

    result = minimize(objective, [seed], bounds=[(lo, hi)], names=("j_t",), max_iter=max_iter)
    result.iterations += prescan_points
    result.warning = warning

    best = float(result.params["j_t"])
    table = sweep_detuning_features(
        devices, rates, j_t=best, reference=reference, theta_deg=theta_deg, n_max=n_max
    )
    model = np.array(
        [
            [r.rel_fluorescence_intensity, r.rel_sharpness, r.rel_phosphorescence_rate]
            for r in table.records
        ]
    )
    per_feature = np.sum((model - measured) ** 2, axis=0)
    result.residuals = {
        "fluorescence": float(per_feature[0]),
        "sharpness": float(per_feature[1]),
        "phosphorescence_rate": float(per_feature[2]),
    }
    return result


def _require_columns(fieldnames, required, path) -> None:
    missing = [c for c in required if c not in (fieldnames or [])]
    if missing:
        raise ConfigError(f"{path}: missing required column(s) {', '.join(missing)}")


def read_dispersion_csv(path) -> DispersionData:
    """Read dispersion data (columns theta_deg, branch, energy_ev, weight)."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, ("theta_deg", "branch", "energy_ev"), path)
        for row in reader:
            tag = (row["branch"] or "").strip()
            records.append(
                DispersionRecord(
                    theta_deg=float(row["theta_deg"]),
                    branch=tag or None,
                    energy=float(row["energy_ev"]),
                    weight=float(row.get("weight") or 1.0),
                )
            )
    if not records:
        raise InsufficientDataError(f"{path}: no dispersion records")
    return DispersionData(records=tuple(records))


def read_feature_csv(path) -> FeatureTable:
    """Read a relative feature table (columns delta_e_ev, rel_fluor,
    rel_sharp, rel_phos_rate); the reference row is the one at relative 1."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _require_columns(
            reader.fieldnames, ("delta_e_ev", "rel_fluor", "rel_sharp", "rel_phos_rate"), path
        )
        for row in reader:
            records.append(
                FeatureRecord(
                    delta_e=float(row["delta_e_ev"]),
                    rel_fluorescence_intensity=float(row["rel_fluor"]),
                    rel_sharpness=float(row["rel_sharp"]),
                    rel_phosphorescence_rate=float(row["rel_phos_rate"]),
                )
            )
    if not records:
        raise InsufficientDataError(f"{path}: no feature records")
    reference = 0
    for k, r in enumerate(records):
        if (
            abs(r.rel_fluorescence_intensity - 1.0) < 1e-12
            and abs(r.rel_sharpness - 1.0) < 1e-12
            and abs(r.rel_phosphorescence_rate - 1.0) < 1e-12
        ):
            reference = k
            break
    return FeatureTable(records=tuple(records), j_t=float("nan"), reference=reference)
