"""
Tests for the self-check suites.
"""

from fractions import Fraction

import pytest

from errors import InvalidParameterError
from farey_core import SequenceParams, count
from tests.conftest import F5_GAPS
from verify import (
    CANONICAL_BOXES,
    SUITES,
    CheckResult,
    _check_areas,
    _check_pair_multiset,
    _check_partition,
    _check_phi_swap,
    _timed,
    brute_force_sequence,
    exact_pair_rows,
    run_suite,
    table_rows,
    uncovered_tail,
)


@pytest.mark.unit
class TestHelpers:
    """Test cases for the oracles behind the suites."""

    def test_brute_force_f3(self):
        """Test the sorted set of fractions of order 3."""
        assert brute_force_sequence(3) == [
            Fraction(0),
            Fraction(1, 3),
            Fraction(1, 2),
            Fraction(2, 3),
            Fraction(1),
        ]

    def test_exact_pair_rows_f5(self):
        """Test one row per consecutive pair, covering the eight F_5 windows."""
        rows = exact_pair_rows(5)
        assert rows.shape == (count(SequenceParams(5)) - 1, 4)
        scaled = {(Fraction(11 * n1, d1), Fraction(11 * n2, d2)) for n1, d1, n2, d2 in rows.tolist()}
        assert set(zip(F5_GAPS, F5_GAPS[1:])) <= scaled

    def test_pair_multiset_is_symmetric(self):
        """Test swap invariance of exact gap pairs for Q <= 40."""
        passed, detail = _check_pair_multiset(40)
        assert passed, detail

    def test_phi_commutes_with_swap(self):
        """Test Phi(sigma(p)) against the swapped Phi(p)."""
        passed, detail = _check_phi_swap(500, seed=1)
        assert passed, detail

    def test_timed_records_failures(self):
        """Test that a failing check is reported, not raised."""
        result = _timed("always fails", lambda: (False, "nope"))
        assert isinstance(result, CheckResult)
        assert not result.passed
        assert result.detail == "nope"
        assert result.seconds >= 0

    def test_partition_with_1e5_points(self):
        """Test that 10^5 random points each fall in exactly their own cell."""
        passed, detail = _check_partition(100_000, seed=1)
        assert passed, detail
        assert detail.startswith("100000 random points")

    def test_areas_check_uses_exact_tail(self):
        """Test the area check and the tail 4/((N + 1)(N + 2))."""
        passed, detail = _check_areas()
        assert passed, detail
        assert uncovered_tail(60) == Fraction(4, 3782)
        assert uncovered_tail(4) == Fraction(2, 15)

    def test_table_rows_with_families(self):
        """Test 41 concrete rows plus 64 family rows for parameters 5..12."""
        assert len(table_rows()) == 105
        assert len(table_rows(range(5, 6))) == 41 + 9 - 1

    def test_canonical_boxes(self):
        """Test that golden-value boxes are finite and two-dimensional."""
        assert all(box.h == 2 and box.finite for box in CANONICAL_BOXES)


@pytest.mark.integration
class TestSuites:
    """Test cases for run_suite with small limits."""

    @pytest.mark.parametrize("name,limit", [("recurrence", 30), ("cells", 12), ("symmetry", 30)])
    def test_small_suites_pass(self, name, limit, settings):
        """Test that each suite passes at a reduced size."""
        results = run_suite(name, limit, settings)
        assert results
        assert all(r.passed for r in results), [(r.name, r.detail) for r in results if not r.passed]

    def test_table1_suite_passes(self, settings):
        """Test the curve catalog suite."""
        results = run_suite("table1", settings=settings)
        assert all(r.passed for r in results), [(r.name, r.detail) for r in results if not r.passed]

    def test_unknown_suite_raises_error(self, settings):
        """Test that the name must be one of SUITES."""
        assert "bogus" not in SUITES
        with pytest.raises(InvalidParameterError, match="Unknown suite"):
            run_suite("bogus", settings=settings)

