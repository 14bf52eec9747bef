from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_FILES = {
    "dynamics": GOLDEN / "dynamics_mechanism1.csv",
    "sweep": GOLDEN / "sweep_mechanism2.csv",
    "branches": GOLDEN / "branches_cavity4.csv",
    "features": GOLDEN / "features_5mev.csv",
}


@pytest.fixture
def golden_path():
    return lambda kind: GOLDEN_FILES[kind]
