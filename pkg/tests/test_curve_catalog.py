"""
Tests for the boundary curve catalog of the h = 2 support.
"""

import dataclasses
import math
from fractions import Fraction

import pytest

from curve_catalog import (
    SCALE,
    CurveFamily,
    CurveForm,
    CurveSpec,
    curve_catalog,
    curve_eval,
    rows_for_cell,
    scaled_ordinate,
    select_rows,
)
from errors import CurveDomainError, EmptyCellError, InvalidParameterError, UnknownCurveError
from phi_measure import phi
from triangle_cells import cell_polygon
from verify import TABLE_TOLERANCE, curve_deviation, table_rows

F = Fraction


def concrete_rows():
    return [row for row in curve_catalog() if isinstance(row, CurveSpec)]


def families():
    return [row for row in curve_catalog() if isinstance(row, CurveFamily)]


@pytest.mark.unit
class TestCatalogShape:
    """Test cases for the catalog contents."""

    def test_row_counts(self):
        """Test 41 concrete rows and 9 family rows."""
        assert len(concrete_rows()) == 41
        assert len(families()) == 9

    def test_concrete_rows_cover_every_edge(self):
        """Test that each finite cell has one row per edge."""
        cells = {row.cell for row in concrete_rows()}
        for k, l in cells:
            edges = sorted(row.edge_index for row in concrete_rows() if row.cell == (k, l))
            assert edges == list(range(len(cell_polygon(k, l).edges)))

    def test_row_endpoints_are_cell_edges(self):
        """Test concrete and instantiated family rows against the polygons."""
        for spec in table_rows():
            edge = cell_polygon(*spec.cell).edges[spec.edge_index]
            assert (edge.start, edge.end) == spec.edge, spec

    def test_corrected_rows_are_flagged(self):
        """Test the two rows whose coefficients or domain were rederived."""
        corrected = [row for row in concrete_rows() if row.corrected]
        assert [(row.cell, row.edge_index) for row in corrected] == [((1, 4), 0), ((3, 2), 3)]
        assert corrected[0].t_domain == (F(4), F(25, 6))
        assert corrected[1].coefficients["a"] == 72

    def test_every_domain_is_ordered(self):
        """Test lo < hi on every concrete and instantiated family row."""
        for spec in table_rows():
            lo, hi = spec.t_domain
            assert hi is None or lo < hi, (spec.cell, spec.edge_index)

    def test_reversed_domain_raises_error(self):
        """Test that a row cannot be built with lo >= hi."""
        row = rows_for_cell(1, 4)[0]
        with pytest.raises(InvalidParameterError):
            dataclasses.replace(row, t_domain=(F(25, 6), F(4)))

    def test_split_hypotenuse_has_its_own_rows(self):
        """Test that T_{1,3} has five rows meeting at (1/4, 3/4)."""
        rows = rows_for_cell(1, 3)
        assert [row.edge_index for row in rows] == [0, 1, 2, 3, 4]
        assert sum((F(1, 4), F(3, 4)) in row.edge for row in rows) == 2

    def test_quadratic_rows_have_no_branch(self):
        """Test the branch tag of rational-quadratic rows."""
        for row in concrete_rows():
            if row.form is CurveForm.RATIONAL_QUADRATIC:
                assert row.branch == 0
            else:
                assert row.branch in (-1, 1)


@pytest.mark.unit
class TestFamilies:
    """Test cases for the infinite family rows."""

    def test_instantiate_first_member(self):
        """Test the (1, 5) edge 0 domain [25/6, 9/2]."""
        family = next(f for f in families() if f.name == "1,l>=5:0")
        spec = family.instantiate(5)
        assert spec.cell == (1, 5)
        assert spec.t_domain == (F(25, 6), F(9, 2))
        assert spec.edge == ((F(2, 3), F(1)), (F(3, 5), F(1)))

    def test_small_l_domain_is_sorted(self):
        """Test that the l = 5, 6 variant stores lo < hi."""
        family = next(f for f in families() if f.name == "1,l=5,6:2")
        for l in (5, 6):
            lo, hi = family.instantiate(l).t_domain
            assert lo < hi

    def test_out_of_range_parameter_raises_error(self):
        """Test that the l >= 7 family refuses l = 6."""
        family = next(f for f in families() if f.name == "1,l>=7:2")
        with pytest.raises(InvalidParameterError):
            family.instantiate(6)

    @pytest.mark.parametrize("cell", [(1, 5), (1, 6), (1, 9), (5, 1), (11, 1)])
    def test_family_cells_have_four_rows(self, cell):
        """Test rows_for_cell on family cells."""
        rows = rows_for_cell(*cell)
        assert [row.edge_index for row in rows] == [0, 1, 2, 3]
        assert all(row.family for row in rows)


@pytest.mark.unit
class TestSelection:
    """Test cases for the row selector used by the CLI."""

    def test_select_cell(self):
        """Test '2,2' gives the four rows of T_{2,2}."""
        rows = select_rows("2,2")
        assert [row.edge_index for row in rows] == [0, 1, 2, 3]

    def test_select_all(self):
        """Test 'all' gives the concrete rows."""
        assert len(select_rows("all")) == 41

    def test_empty_cell_raises_error(self):
        """Test that '9,9' names an empty cell."""
        with pytest.raises(EmptyCellError):
            select_rows("9,9")

    @pytest.mark.parametrize("selector", ["two,two", "2", "0,3"])
    def test_malformed_selector_raises_error(self, selector):
        """Test selectors that name no row."""
        with pytest.raises(UnknownCurveError):
            select_rows(selector)


@pytest.mark.unit
class TestEvaluation:
    """Test cases for curve_eval and scaled_ordinate."""

    def test_endpoint_matches_vertex_image(self):
        """Test that (2, 2) edge 1 starts at the beak Phi(1, 1)."""
        spec = rows_for_cell(2, 2)[1]
        assert scaled_ordinate(spec, 2.0) == pytest.approx(2.0)
        x, y = curve_eval(spec, 2.0)
        assert (x, y) == pytest.approx(phi((F(1), F(1)), 2))

    def test_asymptote_of_first_row(self):
        """Test that (1, 2) edge 0 approaches y = 6/pi^2."""
        spec = rows_for_cell(1, 2)[0]
        assert not spec.bounded
        _, y = curve_eval(spec, 1e8)
        assert abs(y - 6 / math.pi**2) <= 1e-3

    def test_outside_domain_raises_error(self):
        """Test a parameter below the domain."""
        spec = rows_for_cell(2, 2)[1]
        with pytest.raises(CurveDomainError, match="outside"):
            curve_eval(spec, 1.5)

    def test_nan_raises_error(self):
        """Test that NaN is never in a domain."""
        with pytest.raises(CurveDomainError):
            curve_eval(rows_for_cell(2, 1)[0], math.nan)

    def test_scale(self):
        """Test X = 3 t / pi^2."""
        spec = rows_for_cell(2, 1)[0]
        x, _ = curve_eval(spec, 3.0)
        assert x == pytest.approx(SCALE * 3.0)

    def test_curves_match_edge_images(self):
        """Test every row against Phi-images of its edge to 1e-9."""
        for spec in table_rows():
            assert curve_deviation(spec, 50) <= TABLE_TOLERANCE, (spec.cell, spec.edge_index)
