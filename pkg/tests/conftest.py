"""
Common test fixtures and configuration.
"""

import json
import math
from fractions import Fraction
from pathlib import Path

import pytest

from farey_core import SequenceParams
from phi_measure import BoxSpec
from settings import FareySettings

SUPPORT_MIN = 6 / math.pi**2
GOLDEN_PATH = Path(__file__).parent / "data" / "golden_values.json"

# Normalized third gaps of F_5 (N = 11), from the exact formula 11 k / (q q'')
F5_GAPS = [
    Fraction(11, 4),
    Fraction(22, 15),
    Fraction(33, 20),
    Fraction(11, 6),
    Fraction(11, 5),
    Fraction(11, 6),
    Fraction(33, 20),
    Fraction(22, 15),
    Fraction(11, 4),
]


@pytest.fixture
def settings():
    """Settings with small defaults so measure calls stay quick."""
    return FareySettings(
        log_level="WARNING",
        threads=2,
        quad_tol=1e-3,
        max_depth=20,
        mc_samples=200_000,
        seed=1,
    )


@pytest.fixture
def f5_params():
    """The full Farey sequence of order 5."""
    return SequenceParams(5)


@pytest.fixture
def central_box():
    """The (0.7, 1.2)^2 box used for convergence checks."""
    return BoxSpec(((0.7, 1.2), (0.7, 1.2)))


@pytest.fixture
def exact_point():
    """On the boundary between T_{2,1} and T_{2,2}; exact indices (2, 2), sigma gives (1, 9/10)."""
    return (Fraction(7, 10), Fraction(4, 5))


@pytest.fixture
def clean_env(monkeypatch):
    """Remove every variable the settings layer reads."""
    for var in (
        "LOG_LEVEL",
        "FAREY_LOG_FILE",
        "FAREY_THREADS",
        "FAREY_QUAD_TOL",
        "FAREY_MAX_DEPTH",
        "FAREY_MC_SAMPLES",
        "FAREY_SEED",
        "FAREY_CURVE_T_CAP",
    ):
        monkeypatch.delenv(var, raising=False)
    return monkeypatch


@pytest.fixture(scope="session")
def golden():
    """Exact reference values committed under tests/data."""
    with GOLDEN_PATH.open(encoding="utf-8") as handle:
        return json.load(handle)
