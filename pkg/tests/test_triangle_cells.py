"""
Tests for the Farey triangle, L-chains and the exact cell polygons.
"""

from fractions import Fraction

import numpy as np
import pytest

from errors import CellBoundaryError, InvalidParameterError, PointOutsideTriangleError
from farey_core import SequenceParams, farey_sequence
from phi_measure import sample_polygon
from triangle_cells import (
    CellIndex,
    TrianglePoint,
    cell_area,
    cell_polygon,
    clip_convex,
    floor_ratio,
    is_empty,
    k_vector,
    l_chain,
    nonempty_cells,
    polygon_area,
    strip_polygon,
    symmetry_involution,
    walk_chain,
)
from verify import EXCEPTIONAL_CELLS, uncovered_tail

F = Fraction


@pytest.mark.unit
class TestTrianglePoint:
    """Test cases for TrianglePoint validation."""

    def test_corner_is_in_triangle(self):
        """Test that (1, 1) belongs to T."""
        assert TrianglePoint(1, 1).exact

    @pytest.mark.parametrize("x,y", [(F(1, 2), F(1, 2)), (F(0), F(1)), (F(3, 2), F(1, 2)), (0.2, 0.3)])
    def test_outside_points_raise_error(self, x, y):
        """Test the hypotenuse (excluded) and points off T."""
        with pytest.raises(PointOutsideTriangleError):
            TrianglePoint(x, y)

    def test_from_denominators(self):
        """Test the scaling (q'/Q, q''/Q)."""
        assert TrianglePoint.from_denominators(3, 4, 5) == TrianglePoint(F(3, 5), F(4, 5))

    def test_cell_index_rejects_zero(self):
        """Test that indices must be positive."""
        with pytest.raises(InvalidParameterError):
            CellIndex((2, 0))


@pytest.mark.unit
class TestLChain:
    """Test cases for the L-chain and k-vector."""

    def test_chain_reproduces_denominators(self):
        """Test q_{j+i} = Q L_i on every window of F_30."""
        qs = [f.q for f in farey_sequence(SequenceParams(30))]
        for j in range(len(qs) - 5):
            chain = l_chain(TrianglePoint.from_denominators(qs[j], qs[j + 1], 30), 5)
            assert [30 * v for v in chain] == qs[j : j + 6]

    def test_k_vector_exact_boundary(self, exact_point):
        """Test that the floor convention gives (2, 2) at an exact boundary point."""
        assert k_vector(exact_point, 2).ks == (2, 2)

    def test_k_vector_corner(self):
        """Test the corner (1, 1), whose chain is constant."""
        assert l_chain((F(1), F(1)), 4) == [1, 1, 1, 1, 1]
        assert k_vector((F(1), F(1)), 3).ks == (2, 2, 2)

    def test_chain_length_must_be_positive(self):
        """Test n = 0."""
        with pytest.raises(InvalidParameterError):
            l_chain((F(1), F(1)), 0)

    def test_chain_leaving_range_raises_error(self, monkeypatch):
        """Test that a chain step outside (0, 1] is reported, not returned."""
        monkeypatch.setattr("triangle_cells.floor_ratio", lambda num, den: 0)
        with pytest.raises(CellBoundaryError, match="left"):
            walk_chain((0.7, 0.8), 3)

    def test_float_chain_through_boundary(self):
        """Test (0.7, 0.8), whose quotients land on integers up to rounding."""
        assert l_chain((0.7, 0.8), 3) == pytest.approx([0.7, 0.8, 0.9, 1.0])
        assert k_vector((0.7, 0.8), 2).ks == (2, 2)

    def test_float_chain_from_right_edge(self):
        """Test (1, 0.4): (1 + 1)/0.4 = 5 exactly, so L_2 = 1."""
        assert l_chain((1, 0.4), 3) == pytest.approx([1.0, 0.4, 1.0, 0.6])
        assert k_vector((1, 0.4), 2).ks == (5, 1)

    def test_floor_ratio_snaps_floats_only(self):
        """Test the snapped floor against exact Fractions."""
        assert floor_ratio(1.8, 0.9) == 2
        assert floor_ratio(2 - 1e-12, 1.0) == 2
        assert floor_ratio(2 - 1e-6, 1.0) == 1
        assert floor_ratio(F(2) - F(1, 10**12), F(1)) == 1

    def test_random_chains_stay_in_range(self):
        """Test 0 < L_i <= 1 and L_i + L_{i+1} > 1 to depth 8."""
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 500:
            x, y = rng.random(2)
            if x + y <= 1 or x == 0 or y == 0:
                continue
            chain = l_chain((float(x), float(y)), 8)
            assert all(0 < v <= 1 for v in chain)
            assert all(a + b > 1 for a, b in zip(chain, chain[1:]))
            checked += 1

    def test_exact_chains_stay_in_range(self):
        """Test the same bounds on exact points of F_40 windows."""
        qs = [f.q for f in farey_sequence(SequenceParams(40))]
        for j in range(0, len(qs) - 1, 7):
            chain = l_chain(TrianglePoint.from_denominators(qs[j], qs[j + 1], 40), 8)
            assert all(0 < v <= 1 for v in chain)
            assert all(a + b > 1 for a, b in zip(chain, chain[1:]))


@pytest.mark.unit
class TestSymmetryInvolution:
    """Test cases for sigma(p) = (L_3, L_2)."""

    def test_exact_image(self, exact_point):
        """Test sigma(7/10, 4/5) = (1, 9/10) and back."""
        image = symmetry_involution(exact_point)
        assert (image.x, image.y) == (F(1), F(9, 10))
        back = symmetry_involution(image)
        assert (back.x, back.y) == exact_point

    def test_swaps_cell_indices(self):
        """Test that sigma sends T_{k,l} to T_{l,k} at interior points."""
        for poly in nonempty_cells(8):
            vertices = poly.vertices
            cx = sum(v[0] for v in vertices) / len(vertices)
            cy = sum(v[1] for v in vertices) / len(vertices)
            image = symmetry_involution((cx, cy))
            assert k_vector(image, 2) == poly.index.reversed()

    def test_float_boundary_point_maps_back(self):
        """Test sigma(0.7, 0.8) = (1.0, 0.9) and back, with k-vector (2, 2)."""
        image = symmetry_involution((0.7, 0.8))
        assert image.as_float() == pytest.approx((1.0, 0.9))
        back = symmetry_involution(image)
        assert back.as_float() == pytest.approx((0.7, 0.8))
        assert k_vector(image, 2).ks == (2, 2)

    def test_only_cell_22_is_fixed_by_the_swap(self):
        """Test that (2, 2) is the one exceptional cell with k = l."""
        assert [ks for ks in sorted(EXCEPTIONAL_CELLS) if ks[0] == ks[1]] == [(2, 2)]
        assert {(l, k) for k, l in EXCEPTIONAL_CELLS} == EXCEPTIONAL_CELLS

    @pytest.mark.parametrize("k,l", [(2, 3), (2, 4)])
    def test_exceptional_pairs_swap(self, k, l):
        """Test that sigma carries interior points of T_{k,l} into T_{l,k}."""
        for x, y in sample_polygon(cell_polygon(k, l), 200, margin=1e-6):
            assert k_vector(symmetry_involution((float(x), float(y))), 2).ks == (l, k)


@pytest.mark.unit
class TestClipping:
    """Test cases for the generic polygon helpers."""

    def test_clip_square_by_diagonal(self):
        """Test clipping the unit square to x + y <= 1."""
        square = [(F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1))]
        clipped = clip_convex(square, 1, 1, 1)
        assert polygon_area(clipped) == F(1, 2)

    def test_clip_everything_away(self):
        """Test an empty result."""
        square = [(F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1))]
        assert clip_convex(square, 1, 0, -1) == []

    def test_float_area(self):
        """Test that the shoelace also runs on floats."""
        assert polygon_area([(0.0, 0.0), (2.0, 0.0), (0.0, 1.0)]) == pytest.approx(1.0)


@pytest.mark.unit
class TestCellPolygons:
    """Test cases for cell construction, emptiness and area."""

    def test_cell_22_vertices(self):
        """Test T_{2,2} against its edge list, east-most vertex first."""
        poly = cell_polygon(2, 2)
        assert poly.vertices == (
            (F(1), F(4, 5)),
            (F(1), F(1)),
            (F(2, 5), F(3, 5)),
            (F(1, 2), F(1, 2)),
        )
        assert cell_area(poly) == F(1, 10)

    def test_edges_chain_vertices(self):
        """Test that edge i runs from vertex i to vertex i + 1."""
        poly = cell_polygon(1, 3)
        n = len(poly.vertices)
        for i, edge in enumerate(poly.edges):
            assert edge.start == poly.vertices[i]
            assert edge.end == poly.vertices[(i + 1) % n]

    @pytest.mark.parametrize("k,l", [(1, 1), (3, 3), (2, 5), (5, 2), (9, 9)])
    def test_empty_cells(self, k, l):
        """Test cells outside the classification."""
        assert is_empty(k, l)
        assert cell_polygon(k, l).vertices == ()
        assert cell_area(cell_polygon(k, l)) == 0

    def test_classification_up_to_20(self):
        """Test nonempty cells: (1, l), (k, 1) and five exceptions."""
        found = {poly.index.ks for poly in nonempty_cells(20)}
        expected = (
            {(1, l) for l in range(2, 21)}
            | {(k, 1) for k in range(2, 21)}
            | EXCEPTIONAL_CELLS
        )
        assert found == expected

    def test_nonempty_cells_order(self):
        """Test lexicographic order of the iterator."""
        indices = [poly.index.ks for poly in nonempty_cells(4)]
        assert indices == sorted(indices)

    def test_strip_polygons_cover_triangle(self):
        """Test that the h = 1 cells T_k have area summing towards 1/2."""
        total = sum(cell_area(strip_polygon(k)) for k in range(1, 401))
        assert abs(float(total) - 0.5) < 1e-4

    def test_strip_one(self):
        """Test T_1: (1 + x)/2 < y <= 1, a triangle of area 1/6."""
        poly = strip_polygon(1)
        assert cell_area(poly) == F(1, 6)
        assert poly.contains((F(1, 2), F(9, 10)))
        assert not poly.contains((F(1), F(1)))

    def test_ownership_follows_floor_convention(self):
        """Test that a shared edge belongs to exactly one of its two cells."""
        point = (F(7, 10), F(4, 5))
        owners = [poly.index.ks for poly in nonempty_cells(6) if poly.contains(point)]
        assert owners == [(2, 2)]

    def test_area_sum(self):
        """Test that cells with indices <= 60 miss exactly the uncovered tail."""
        total = sum(cell_area(poly) for poly in nonempty_cells(60))
        assert total + uncovered_tail(60) == F(1, 2)
        assert float(uncovered_tail(60)) == pytest.approx(1.0576e-3, rel=1e-3)

    @pytest.mark.parametrize("limit", [4, 5, 9, 20])
    def test_uncovered_tail_small_limits(self, limit):
        """Test the tail identity where every cell can be listed."""
        total = sum(cell_area(poly) for poly in nonempty_cells(limit))
        assert total + uncovered_tail(limit) == F(1, 2)

    def test_area_sum_shrinks_with_limit(self):
        """Test that indices <= 240 leave less than 1e-4 of T."""
        total = sum(cell_area(poly) for poly in nonempty_cells(240))
        assert 0 < F(1, 2) - total < F(1, 10**4)

    def test_split_hypotenuse_of_cell_13(self):
        """Test that T_{1,3} carries (1/4, 3/4) as a fifth, collinear vertex."""
        poly = cell_polygon(1, 3)
        assert (F(1, 4), F(3, 4)) in poly.vertices
        assert len(poly.edges) == 5
        corners = [v for v in poly.vertices if v != (F(1, 4), F(3, 4))]
        assert cell_area(poly) == polygon_area(corners)
        halves = [e for e in poly.edges if (F(1, 4), F(3, 4)) in (e.start, e.end)]
        assert len(halves) == 2
        assert halves[0].label == halves[1].label
        assert not any(edge.owned for edge in halves)

    def test_no_other_cell_is_split(self):
        """Test that every other cell keeps its corner count."""
        for poly in nonempty_cells(12):
            if poly.index.ks != (1, 3) and cell_area(poly) > 0:
                xs = poly.vertices
                n = len(xs)
                for i in range(n):
                    (x0, y0), (x1, y1), (x2, y2) = xs[i - 1], xs[i], xs[(i + 1) % n]
                    assert (x1 - x0) * (y2 - y0) != (x2 - x0) * (y1 - y0), poly.index

    def test_negative_index_raises_error(self):
        """Test that indices must be positive."""
        with pytest.raises(InvalidParameterError):
            cell_polygon(0, 2)
