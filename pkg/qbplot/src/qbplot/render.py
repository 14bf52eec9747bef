"""One renderer per artifact kind, with pinned styling.

Output is deterministic: Agg backend, fixed SVG hash salt, no embedded
creation date, text kept as text. The same CSV renders to the same bytes.
"""
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import read_table

TRIPLET_EV = 1.75

STYLE = {
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.25,
    "grid.linewidth": 0.6,
    "svg.hashsalt": "qbplot",
    "svg.fonttype": "none",
}

_POPULATION_CURVES = (
    ("mean_photons", "photons", "tab:blue"),
    ("p_d_s1", "donor S1", "tab:green"),
    ("p_a_s1", "acceptor S1", "tab:orange"),
    ("p_a_t1", "acceptor T1", "tab:red"),
)


def _dynamics(table):
    fig, ax = plt.subplots(figsize=(5.2, 3.4), layout="constrained")
    t = table["t_ns"]
    on = t > 0  # log axis cannot show the t=0 row
    for column, label, color in _POPULATION_CURVES:
        ax.plot(t[on], table[column][on], label=label, color=color, lw=1.4)
    phase = table["phase"]
    for k in range(1, len(phase)):
        if phase[k] != phase[k - 1]:
            ax.axvline(t[k], color="0.45", ls=":", lw=0.9)
    ax.set_xscale("log")
    ax.set_xlabel("time (ns)")
    ax.set_ylabel("population")
    if len(t):
        ax.legend(frameon=False, fontsize=8)
    return fig


def _sweep(table):
    fig, (top, bottom) = plt.subplots(
        2, 1, figsize=(5.2, 4.8), sharex=True,
        height_ratios=[3, 2], layout="constrained",
    )
    x = table["omega0_ev"]
    for column, label in (("e_up", "UP"), ("e_mp", "MP"), ("e_lp", "LP"), ("e_ttilde", "T")):
        top.plot(x, table[column], label=label, lw=1.2)
    top.axhline(TRIPLET_EV, color="0.3", ls="--", lw=0.9)
    top.set_ylabel("branch energy (eV)")
    if len(x):
        top.legend(frameon=False, fontsize=8, ncols=4)
    p = table["p_t1_probe"]
    bottom.plot(x, p, color="tab:red", lw=1.4)
    if len(x):
        peak = int(np.argmax(p))
        bottom.axvline(x[peak], color="0.45", ls=":", lw=0.9)
    bottom.set_xlabel("bare cavity energy (eV)")
    bottom.set_ylabel("triplet population")
    return fig


def _branches(table):
    fig, ax = plt.subplots(figsize=(5.2, 3.6), layout="constrained")
    theta, energy = table["theta_deg"], table["energy_ev"]
    for label in dict.fromkeys(table["branch"]):
        sel = table["branch"] == label
        order = np.argsort(theta[sel], kind="stable")
        ax.plot(theta[sel][order], energy[sel][order], color="0.8", lw=0.7, zorder=1)
    # character coloring: red cavity, green donor, blue acceptor+triplet
    rgb = np.column_stack(
        [table["w_cavity"], table["w_d"], table["w_a"] + table["w_t"]]
    )
    ax.scatter(theta, energy, c=np.clip(rgb, 0.0, 1.0), s=13, zorder=2)
    ax.axhline(TRIPLET_EV, color="0.3", ls="--", lw=0.9)
    ax.set_xlabel("incidence angle (deg)")
    ax.set_ylabel("energy (eV)")
    ax.set_title("character: red cavity / green donor / blue acceptor", fontsize=8)
    return fig


def _features(table):
    fig, axes = plt.subplots(3, 1, figsize=(4.6, 5.6), sharex=True, layout="constrained")
    x = table["delta_e_ev"]
    order = np.argsort(x)
    panels = (
        ("rel_fluor", "rel. fluorescence"),
        ("rel_sharp", "rel. sharpness"),
        ("rel_phos_rate", "rel. phosph. rate"),
    )
    for ax, (column, label) in zip(axes, panels):
        ax.axhline(1.0, color="0.3", ls="--", lw=0.9)
        ax.plot(x[order], table[column][order], marker="o", ms=4, lw=1.1, color="tab:purple")
        ax.set_ylabel(label)
    axes[-1].set_xlabel("lower-branch detuning from triplet (eV)")
    return fig


KINDS = {
    "dynamics": _dynamics,
    "sweep": _sweep,
    "branches": _branches,
    "features": _features,
}


def render(kind: str, in_path, out_path) -> None:
    """Read one artifact CSV and write the figure as SVG."""
    table = read_table(in_path, kind)
    with plt.rc_context(STYLE):
        fig = KINDS[kind](table)
        try:
            fig.savefig(out_path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
