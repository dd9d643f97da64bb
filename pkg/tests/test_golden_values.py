"""
Tests against the reference values committed in tests/data/golden_values.json.
"""

import math
from fractions import Fraction

import pytest

from farey_core import SequenceParams, count, gap_tuples
from phi_measure import SCALE, BoxSpec, measure_box, phi
from triangle_cells import cell_area, cell_polygon, strip_polygon
from verify import uncovered_tail


def parse_bound(value):
    return math.inf if value == "inf" else float(value)


@pytest.mark.unit
class TestGoldenValues:
    """Test cases replaying every recorded value."""

    def test_farey_counts(self, golden):
        """Test |F_Q| for the recorded orders."""
        for order, expected in golden["farey_counts"].items():
            assert count(SequenceParams(int(order))) == expected

    def test_f5_third_gaps(self, golden):
        """Test the exact single gaps of F_5 in sequence order."""
        expected = [Fraction(v) for v in golden["f5_third_gaps"]]
        assert [w.values[0] for w in gap_tuples(SequenceParams(5), 1, exact=True)] == expected

    def test_strip_and_cell_areas(self, golden):
        """Test exact areas of T_k and T_{k,l}."""
        for k, area in golden["strip_areas"].items():
            assert cell_area(strip_polygon(int(k))) == Fraction(area)
        for cell, area in golden["cell_areas"].items():
            k, l = (int(v) for v in cell.split(","))
            assert cell_area(cell_polygon(k, l)) == Fraction(area)

    def test_uncovered_tail(self, golden):
        """Test the recorded tails."""
        for limit, tail in golden["uncovered_tail"].items():
            assert uncovered_tail(int(limit)) == Fraction(tail)

    def test_phi_values(self, golden):
        """Test Phi divided by 3/pi^2 at the recorded points."""
        for record in golden["phi_over_scale"]:
            values = phi(tuple(record["point"]), record["h"])
            assert [v / SCALE for v in values] == pytest.approx(record["value"], rel=1e-12)

    def test_measure_values(self, golden, settings):
        """Test boxes whose measure is known without sampling."""
        for record in golden["measure"]:
            box = BoxSpec(tuple((parse_bound(a), parse_bound(b)) for a, b in record["box"]))
            assert measure_box(box, settings=settings).value == pytest.approx(record["value"], abs=1e-12)
