"""Command-line interface.

Parses a strict JSON configuration plus flags, dispatches simulations,
sweeps, eigenanalyses, and fits, and writes deterministic CSV artifacts
(9+ significant digits, comma separator, LF endings, no timestamps).
Run metadata goes to a run_meta.json sidecar next to the data files.

Exit codes: 0 success, 2 configuration problems, 3 numerical failures.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DomainError,
    InvalidCutoffError,
    InvalidLevelError,
    InvalidRateError,
    QbsimError,
)
from .fitting import fit_coupled_oscillator, fit_triplet_coupling, read_dispersion_csv, read_feature_csv
from .hilbert import CompositeBasis
from .model import DeviceParams, RateParams
from .observables import trajectory_populations
from .polaritons import polariton_branches
from .presets import DEVICE_PRESETS, device_preset, rate_preset
from .protocols import (
    Phase,
    Scenario,
    charge_relax_scenario,
    run_scenario,
    sweep_cavity_energy,
    sweep_detuning_features,
)

_CONFIG_SCHEMA = {
    "device": {"preset", "omega_c0", "omega_d", "omega_a", "omega_t", "j_d", "j_a", "j_t", "n_eff"},
    "rates": {"preset", "gamma_p", "gamma_c", "gamma_d", "gamma_a", "gamma_ic", "gamma_isc"},
    "geometry": {"theta_deg", "n_max"},
    "scenario": {"phases"},
    "sweep": {"parameter", "from_ev", "to_ev", "steps", "probe_time_ns"},
    "fit": {"data", "free", "bounds_mev", "prescan_points", "devices"},
    "output": {"directory", "precision"},
}
_PHASE_KEYS = {"duration_ns", "pump", "cavity_open", "label"}

_CONFIG_EXITS = (ConfigError, DomainError, InvalidRateError, InvalidCutoffError, InvalidLevelError)


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    for section, body in cfg.items():
        if section not in _CONFIG_SCHEMA:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(body, dict):
            raise ConfigError(f"config section {section!r} must be an object")
        unknown = set(body) - _CONFIG_SCHEMA[section]
        if unknown:
            raise ConfigError(f"unknown key(s) in config section {section!r}: {', '.join(sorted(unknown))}")
    for phase in cfg.get("scenario", {}).get("phases", []):
        if not isinstance(phase, dict):
            raise ConfigError("scenario phases must be objects")
        unknown = set(phase) - _PHASE_KEYS
        if unknown:
            raise ConfigError(f"unknown key(s) in scenario phase: {', '.join(sorted(unknown))}")
    return cfg


def _resolve_device(cfg: dict, preset_flag, j_t_flag=None) -> DeviceParams:
    section = dict(cfg.get("device", {}))
    name = preset_flag or section.pop("preset", None)
    if name is not None:
        device = device_preset(name)
        if section:
            device = device.replace(**section)
    elif section:
        try:
            device = DeviceParams(**section)
        except TypeError as exc:
            raise ConfigError(f"incomplete device section: {exc}") from exc
    else:
        raise ConfigError("no device given: pass --preset or a config device section")
    if j_t_flag is not None:
        device = device.replace(j_t=j_t_flag)
    return device


def _resolve_rates(cfg: dict) -> RateParams:
    section = dict(cfg.get("rates", {}))
    name = section.pop("preset", None)
    rates = rate_preset(name) if name else rate_preset()
    if section:
        if name:
            rates = rates.replace(**section)
        else:
            try:
                rates = RateParams(**section)
            except TypeError as exc:
                raise ConfigError(f"incomplete rates section: {exc}") from exc
    return rates


def _resolve_geometry(cfg: dict, args) -> tuple[float, int]:
    geo = cfg.get("geometry", {})
    theta = args.theta if args.theta is not None else float(geo.get("theta_deg", 0.0))
    n_max = args.n_max if args.n_max is not None else int(geo.get("n_max", 2))
    return theta, n_max


def _fmt(value, precision: int) -> str:
    return f"{float(value):.{precision}g}"


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_meta(out_dir: Path, command: str, detail: dict) -> None:
    meta = {"tool": "qbsim", "version": __version__, "command": command, **detail}
    with open(out_dir / "run_meta.json", "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(cfg: dict, args) -> Path:
    directory = args.out_dir or cfg.get("output", {}).get("directory", ".")
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _precision(cfg: dict, args) -> int:
    precision = args.precision if args.precision is not None else int(cfg.get("output", {}).get("precision", 9))
    if precision < 9:
        raise ConfigError(f"output precision must be >= 9 significant digits, got {precision}")
    return precision


def _scenario_phases(cfg: dict, args) -> list[Phase]:
    spec = cfg.get("scenario", {}).get("phases")
    if spec:
        phases = []
        for p in spec:
            try:
                phases.append(
                    Phase(
                        duration=float(p["duration_ns"]),
                        pump=bool(p["pump"]),
                        cavity_open=bool(p.get("cavity_open", False)),
                        label=str(p.get("label", "")),
                    )
                )
            except KeyError as exc:
                raise ConfigError(f"scenario phase missing key {exc}") from exc
        return phases
    return [
        Phase(duration=args.charge_ns, pump=True, label="charge"),
        Phase(duration=args.relax_ns, pump=False, cavity_open=args.relax_open, label="relax"),
    ]


def _write_trajectory(out_dir: Path, traj, precision: int) -> None:
    rows = []
    labels = traj.phase_labels
    for rec, label in zip(trajectory_populations(traj), labels):
        rows.append(
            [
                _fmt(rec.t, precision),
                _fmt(rec.p_ground, precision),
                _fmt(rec.mean_photons, precision),
                _fmt(rec.p_donor_s1, precision),
                _fmt(rec.p_acceptor_s1, precision),
                _fmt(rec.p_acceptor_t1, precision),
                label,
            ]
        )
    _write_csv(
        out_dir / "trajectory.csv",
        ("t_ns", "p_ground", "mean_photons", "p_d_s1", "p_a_s1", "p_a_t1", "phase"),
        rows,
    )


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    device = _resolve_device(cfg, args.preset, args.j_t)
    rates = _resolve_rates(cfg)
    theta, n_max = _resolve_geometry(cfg, args)
    out_dir = _out_dir(cfg, args)
    precision = _precision(cfg, args)

    scenario = Scenario(
        device=device, rates=rates, phases=_scenario_phases(cfg, args),
        theta_deg=theta, n_max=n_max,
    )
    traj = run_scenario(scenario)
    _write_trajectory(out_dir, traj, precision)
    _write_meta(
        out_dir, "simulate",
        {
            "device": dataclasses.asdict(device),
            "rates": dataclasses.asdict(rates),
            "theta_deg": theta,
            "n_max": n_max,
            "phases": traj.metadata["phases"],
        },
    )
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    device = _resolve_device(cfg, args.preset, args.j_t)
    rates = _resolve_rates(cfg)
    theta, n_max = _resolve_geometry(cfg, args)
    out_dir = _out_dir(cfg, args)
    precision = _precision(cfg, args)

    sweep_cfg = cfg.get("sweep", {})
    lo = args.sweep_from if args.sweep_from is not None else float(sweep_cfg.get("from_ev", 1.6))
    hi = args.sweep_to if args.sweep_to is not None else float(sweep_cfg.get("to_ev", 2.1))
    steps = args.steps if args.steps is not None else int(sweep_cfg.get("steps", 100))
    probe = args.probe_ns if args.probe_ns is not None else float(sweep_cfg.get("probe_time_ns", 10.0))
    parameter = sweep_cfg.get("parameter", "omega_c0")
    if parameter != "omega_c0":
        raise ConfigError(f"only omega_c0 sweeps are supported, got {parameter!r}")

    template = Scenario(
        device=device, rates=rates,
        phases=[Phase(duration=probe, pump=True, label="charge")],
        theta_deg=theta, n_max=n_max,
    )
    grid = np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])
    result = sweep_cavity_energy(template, grid, probe_time=probe, jobs=args.jobs)

    rows = []
    for k, w0 in enumerate(result.grid):
        rows.append(
            [
                _fmt(w0, precision),
                _fmt(result.p_t1[k], precision),
                _fmt(result.branch_energies["UP"][k], precision),
                _fmt(result.branch_energies["MP"][k], precision),
                _fmt(result.branch_energies["LP"][k], precision),
                _fmt(result.branch_energies["TT"][k], precision),
            ]
        )
    _write_csv(
        out_dir / "sweep.csv",
        ("omega0_ev", "p_t1_probe", "e_up", "e_mp", "e_lp", "e_ttilde"),
        rows,
    )
    _write_meta(
        out_dir, "sweep",
        {
            "device": dataclasses.asdict(device),
            "rates": dataclasses.asdict(rates),
            "theta_deg": theta,
            "n_max": n_max,
            "grid": {"from_ev": lo, "to_ev": hi, "steps": steps},
            "probe_time_ns": probe,
            "argmax_omega0_ev": result.argmax_omega,
        },
    )
    return 0


def _cmd_polaritons(args) -> int:
    cfg = _load_config(args.config)
    device = _resolve_device(cfg, args.preset, args.j_t)
    theta, _ = _resolve_geometry(cfg, args)
    out_dir = _out_dir(cfg, args)
    precision = _precision(cfg, args)

    if args.theta_to is not None:
        thetas = np.linspace(theta, args.theta_to, args.theta_steps)
    else:
        thetas = np.array([theta])

    rows = []
    for th in thetas:
        for branch in polariton_branches(device, th):
            rows.append(
                [
                    _fmt(th, precision),
                    branch.label,
                    _fmt(branch.energy, precision),
                    _fmt(branch.w_cavity, precision),
                    _fmt(branch.w_donor, precision),
                    _fmt(branch.w_acceptor, precision),
                    _fmt(branch.w_triplet, precision),
                ]
            )
    _write_csv(
        out_dir / "branches.csv",
        ("theta_deg", "branch", "energy_ev", "w_cavity", "w_d", "w_a", "w_t"),
        rows,
    )
    _write_meta(out_dir, "polaritons", {"device": dataclasses.asdict(device), "theta_deg": list(map(float, thetas))})
    return 0


def _write_fit(out_dir: Path, rows, precision: int) -> None:
    _write_csv(out_dir / "fit.csv", ("param", "value", "stderr_proxy"), rows)


def _cmd_fit_dispersion(args) -> int:
    cfg = _load_config(args.config)
    out_dir = _out_dir(cfg, args)
    precision = _precision(cfg, args)
    fit_cfg = cfg.get("fit", {})

    data_path = args.data or fit_cfg.get("data")
    if not data_path:
        raise ConfigError("fit-dispersion needs --in or a config fit.data path")
    free = tuple((args.free or ",".join(fit_cfg.get("free", ["omega_c0", "j_d", "j_a"]))).split(","))

    data = read_dispersion_csv(data_path)
    init = device_preset(args.init_preset)
    result = fit_coupled_oscillator(data, init, free=free)

    dof = max(1, len(data.records) - len(free))
    proxy = (result.objective / dof) ** 0.5
    rows = [[name, _fmt(value, precision), _fmt(proxy, precision)] for name, value in result.params.items()]
    _write_fit(out_dir, rows, precision)
    _write_meta(
        out_dir, "fit-dispersion",
        {
            "data": str(data_path),
            "free": list(free),
            "objective": result.objective,
            "iterations": result.iterations,
            "converged": result.converged,
        },
    )
    return 0


def _cmd_fit_jt(args) -> int:
    cfg = _load_config(args.config)
    out_dir = _out_dir(cfg, args)
    precision = _precision(cfg, args)
    fit_cfg = cfg.get("fit", {})

    data_path = args.data or fit_cfg.get("data")
    if not data_path:
        raise ConfigError("fit-jt needs --in or a config fit.data path")
    device_names = (args.devices or ",".join(fit_cfg.get("devices", [
        "cavity1", "cavity2", "cavity3", "cavity4", "cavity5"]))).split(",")
    bounds_mev = args.bounds_mev or fit_cfg.get("bounds_mev", [0.1, 20.0])
    prescan = args.prescan if args.prescan is not None else int(fit_cfg.get("prescan_points", 50))

    features = read_feature_csv(data_path)
    devices = [device_preset(n) for n in device_names]
    rates = _resolve_rates(cfg)
    result = fit_triplet_coupling(
        features, devices, rates,
        j_t_bounds=(bounds_mev[0] * 1e-3, bounds_mev[1] * 1e-3),
        prescan_points=prescan,
        reference=features.reference,
    )
    if result.warning:
        print(f"warning: {result.warning}", file=sys.stderr)

    dof = max(1, 3 * len(devices) - 1)
    proxy = (result.objective / dof) ** 0.5
    rows = [["j_t", _fmt(result.params["j_t"], precision), _fmt(proxy, precision)]]
    _write_fit(out_dir, rows, precision)
    _write_meta(
        out_dir, "fit-jt",
        {
            "data": str(data_path),
            "devices": device_names,
            "bounds_mev": list(map(float, bounds_mev)),
            "objective": result.objective,
            "iterations": result.iterations,
            "converged": result.converged,
            "warning": result.warning,
            "residuals": result.residuals,
        },
    )
    return 0


def _cmd_figures_data(args) -> int:
    cfg = _load_config(args.config)
    out_dir = _out_dir(cfg, args)
    precision = _precision(cfg, args)
    rates = _resolve_rates(cfg)

    for preset in ("mechanism1", "mechanism2"):
        scenario = charge_relax_scenario(
            device_preset(preset), rates, charge_ns=args.charge_ns, relax_ns=args.relax_ns
        )
        traj = run_scenario(scenario)
        sub = out_dir / f"dynamics_{preset}"
        sub.mkdir(parents=True, exist_ok=True)
        _write_trajectory(sub, traj, precision)
        (sub / "trajectory.csv").replace(out_dir / f"dynamics_{preset}.csv")
        sub.rmdir()

    template = Scenario(
        device=device_preset("mechanism2"), rates=rates,
        phases=[Phase(duration=10.0, pump=True, label="charge")],
    )
    grid = np.linspace(1.6, 2.1, args.sweep_steps)
    sweep = sweep_cavity_energy(template, grid, probe_time=10.0, jobs=args.jobs)
    rows = [
        [
            _fmt(w0, precision),
            _fmt(sweep.p_t1[k], precision),
            _fmt(sweep.branch_energies["UP"][k], precision),
            _fmt(sweep.branch_energies["MP"][k], precision),
            _fmt(sweep.branch_energies["LP"][k], precision),
            _fmt(sweep.branch_energies["TT"][k], precision),
        ]
        for k, w0 in enumerate(sweep.grid)
    ]
    _write_csv(
        out_dir / "sweep_mechanism2.csv",
        ("omega0_ev", "p_t1_probe", "e_up", "e_mp", "e_lp", "e_ttilde"), rows,
    )

    branch_device = device_preset("cavity4").replace(j_t=0.005)
    rows = []
    for th in np.linspace(0.0, 60.0, 61):
        for branch in polariton_branches(branch_device, th):
            rows.append(
                [
                    _fmt(th, precision),
                    branch.label,
                    _fmt(branch.energy, precision),
                    _fmt(branch.w_cavity, precision),
                    _fmt(branch.w_donor, precision),
                    _fmt(branch.w_acceptor, precision),
                    _fmt(branch.w_triplet, precision),
                ]
            )
    _write_csv(
        out_dir / "branches_cavity4.csv",
        ("theta_deg", "branch", "energy_ev", "w_cavity", "w_d", "w_a", "w_t"), rows,
    )

    devices = [device_preset(f"cavity{k}") for k in range(1, 6)]
    table = sweep_detuning_features(devices, rates, j_t=0.005)
    rows = [
        [
            _fmt(r.delta_e, precision),
            _fmt(r.rel_fluorescence_intensity, precision),
            _fmt(r.rel_sharpness, precision),
            _fmt(r.rel_phosphorescence_rate, precision),
        ]
        for r in table.records
    ]
    _write_csv(
        out_dir / "features_5mev.csv",
        ("delta_e_ev", "rel_fluor", "rel_sharp", "rel_phos_rate"), rows,
    )

    _write_meta(
        out_dir, "figures-data",
        {
            "charge_ns": args.charge_ns,
            "relax_ns": args.relax_ns,
            "sweep_steps": args.sweep_steps,
            "files": [
                "dynamics_mechanism1.csv",
                "dynamics_mechanism2.csv",
                "sweep_mechanism2.csv",
                "branches_cavity4.csv",
                "features_5mev.csv",
            ],
        },
    )
    return 0


def _add_common(parser) -> None:
    parser.add_argument("--config", help="JSON config file (strict schema)")
    parser.add_argument("--out-dir", help="output directory (default: current)")
    parser.add_argument("--precision", type=int, help="significant digits in CSVs (>= 9)")
    parser.add_argument(
        "--jobs", type=int, default=int(os.environ.get("QBSIM_JOBS", "1")),
        help="parallel workers for sweep grids (env QBSIM_JOBS)",
    )


def _add_device_flags(parser) -> None:
    parser.add_argument("--preset", choices=sorted(DEVICE_PRESETS), help="built-in device")
    parser.add_argument("--j-t", type=float, default=None, help="override cavity-triplet coupling (eV)")
    parser.add_argument("--theta", type=float, default=None, help="incidence angle (degrees)")
    parser.add_argument("--n-max", type=int, default=None, help="Fock cutoff")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbsim",
        description="Triplet-storage cavity battery simulator: dynamics, sweeps, polaritons, fits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="charge/relax trajectory to trajectory.csv")
    _add_common(p)
    _add_device_flags(p)
    p.add_argument("--charge-ns", type=float, default=100.0)
    p.add_argument("--relax-ns", type=float, default=1e4)
    p.add_argument("--relax-open", action="store_true", help="zero all couplings during relaxation")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="cavity-energy sweep to sweep.csv")
    _add_common(p)
    _add_device_flags(p)
    p.add_argument("--from", dest="sweep_from", type=float, default=None, help="grid start (eV)")
    p.add_argument("--to", dest="sweep_to", type=float, default=None, help="grid end (eV)")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--probe-ns", type=float, default=None, help="probe time (ns)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("polaritons", help="branch energies/characters to branches.csv")
    _add_common(p)
    _add_device_flags(p)
    p.add_argument("--theta-to", type=float, default=None, help="scan end angle (degrees)")
    p.add_argument("--theta-steps", type=int, default=31)
    p.set_defaults(func=_cmd_polaritons)

    p = sub.add_parser("fit-dispersion", help="coupled-oscillator fit of dispersion CSV to fit.csv")
    _add_common(p)
    p.add_argument("--in", dest="data", help="dispersion CSV (theta_deg, branch, energy_ev[, weight])")
    p.add_argument("--init-preset", default="cavity1", choices=sorted(DEVICE_PRESETS))
    p.add_argument("--free", default=None, help="comma list among omega_c0,n_eff,j_d,j_a")
    p.set_defaults(func=_cmd_fit_dispersion)

    p = sub.add_parser("fit-jt", help="triplet-coupling fit of a feature CSV to fit.csv")
    _add_common(p)
    p.add_argument("--in", dest="data", help="feature CSV (delta_e_ev, rel_fluor, rel_sharp, rel_phos_rate)")
    p.add_argument("--devices", default=None, help="comma list of device presets (row order)")
    p.add_argument("--bounds-mev", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--prescan", type=int, default=None, help="grid pre-scan points")
    p.set_defaults(func=_cmd_fit_jt)

    p = sub.add_parser("figures-data", help="replication CSV bundle for the plotting tool")
    _add_common(p)
    p.add_argument("--charge-ns", type=float, default=100.0)
    p.add_argument("--relax-ns", type=float, default=1e8)
    p.add_argument("--sweep-steps", type=int, default=100)
    p.set_defaults(func=_cmd_figures_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_EXITS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QbsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
