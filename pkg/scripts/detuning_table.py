#!/usr/bin/env python3
"""Polariton detunings of the five-cavity series.

Prints the lower-branch energy, the detuning from the acceptor triplet,
and the deviation from the measured reference values for each device.
"""
from qbsim import detuning
from qbsim.presets import REFERENCE_DETUNINGS, device_preset

print(f"{'device':<10} {'E_LP eV':>9} {'dE eV':>8} {'ref eV':>8} {'miss meV':>9}")
for name, ref in REFERENCE_DETUNINGS.items():
    report = detuning(device_preset(name))
    print(
        f"{name:<10} {report.e_lp:>9.4f} {report.delta_e:>8.4f} "
        f"{ref:>8.3f} {(report.delta_e - ref) * 1e3:>9.2f}"
    )
