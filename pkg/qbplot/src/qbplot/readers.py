"""Schema-checked readers for the simulator's CSV artifacts.

Each artifact kind has a fixed column set; a file whose header deviates
from it is rejected with the offending column names in the message.
"""
import csv

import numpy as np


class SchemaError(Exception):
    """Input CSV does not match the expected column schema."""


SCHEMAS = {
    "dynamics": ("t_ns", "p_ground", "mean_photons", "p_d_s1", "p_a_s1", "p_a_t1", "phase"),
    "sweep": ("omega0_ev", "p_t1_probe", "e_up", "e_mp", "e_lp", "e_ttilde"),
    "branches": ("theta_deg", "branch", "energy_ev", "w_cavity", "w_d", "w_a", "w_t"),
    "features": ("delta_e_ev", "rel_fluor", "rel_sharp", "rel_phos_rate"),
}

_LABEL_COLUMNS = {"phase", "branch"}


def read_table(path, kind: str) -> dict:
    """Load one artifact CSV as {column: array}.

    Label columns come back as object arrays of strings, everything else
    as float arrays. Header must contain exactly the kind's columns.
    """
    expected = SCHEMAS[kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {','.join(expected)}")
        missing = [c for c in expected if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        extra = [c for c in header if c not in expected]
        if extra:
            raise SchemaError(f"{path}: unexpected column(s) {', '.join(extra)}")
        rows = [r for r in reader if r]

    for k, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise SchemaError(f"{path}: line {k} has {len(row)} fields, header has {len(header)}")

    table = {}
    for column in expected:
        j = header.index(column)
        values = [row[j] for row in rows]
        if column in _LABEL_COLUMNS:
            table[column] = np.array(values, dtype=object)
        else:
            try:
                table[column] = np.array([float(v) for v in values])
            except ValueError:
                bad = next(v for v in values if not _is_float(v))
                raise SchemaError(f"{path}: column {column} holds non-numeric value {bad!r}")
    return table


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False
