import csv

import numpy as np
import pytest

from qbplot import SCHEMAS, SchemaError, read_table

from conftest import GOLDEN_FILES


@pytest.mark.parametrize("kind", sorted(SCHEMAS))
def test_golden_tables_load(kind):
    table = read_table(GOLDEN_FILES[kind], kind)
    assert set(table) == set(SCHEMAS[kind])
    lengths = {len(v) for v in table.values()}
    assert len(lengths) == 1 and lengths.pop() > 0
    for column, values in table.items():
        if column in ("phase", "branch"):
            assert values.dtype == object
        else:
            assert values.dtype == np.float64


def _rewrite_without(src, dst, column):
    with open(src, newline="") as fh:
        rows = list(csv.reader(fh))
    drop = rows[0].index(column)
    with open(dst, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow(row[:drop] + row[drop + 1 :])


@pytest.mark.parametrize(
    "kind,column",
    [
        ("dynamics", "mean_photons"),
        ("sweep", "p_t1_probe"),
        ("branches", "energy_ev"),
        ("features", "rel_phos_rate"),
    ],
)
def test_missing_column_is_named(tmp_path, kind, column):
    bad = tmp_path / "bad.csv"
    _rewrite_without(GOLDEN_FILES[kind], bad, column)
    with pytest.raises(SchemaError, match=column):
        read_table(bad, kind)


def test_extra_column_is_named(tmp_path):
    with open(GOLDEN_FILES["features"], newline="") as fh:
        rows = list(csv.reader(fh))
    rows[0].append("bonus")
    for row in rows[1:]:
        row.append("0")
    bad = tmp_path / "extra.csv"
    with open(bad, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    with pytest.raises(SchemaError, match="bonus"):
        read_table(bad, "features")


def test_non_numeric_value_is_diagnosed(tmp_path):
    bad = tmp_path / "nan.csv"
    bad.write_text("delta_e_ev,rel_fluor,rel_sharp,rel_phos_rate\n0.1,oops,1,1\n")
    with pytest.raises(SchemaError, match="rel_fluor"):
        read_table(bad, "features")


def test_ragged_row_is_diagnosed(tmp_path):
    bad = tmp_path / "ragged.csv"
    bad.write_text("delta_e_ev,rel_fluor,rel_sharp,rel_phos_rate\n0.1,1,1\n")
    with pytest.raises(SchemaError, match="line 2"):
        read_table(bad, "features")


def test_zero_byte_file_is_rejected(tmp_path):
    bad = tmp_path / "empty.csv"
    bad.write_text("")
    with pytest.raises(SchemaError, match="empty file"):
        read_table(bad, "features")


def test_header_only_file_loads_empty(tmp_path):
    ok = tmp_path / "header.csv"
    ok.write_text("delta_e_ev,rel_fluor,rel_sharp,rel_phos_rate\n")
    table = read_table(ok, "features")
    assert all(len(v) == 0 for v in table.values())
