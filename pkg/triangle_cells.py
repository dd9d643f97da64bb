"""
Geometry of the Farey triangle T = {(x, y): 0 < x <= 1, 0 < y <= 1, x + y > 1}.

A point (x, y) stands for a pair of consecutive denominators (q'/Q, q''/Q).
The L-chain L_0 = x, L_1 = y, L_i = k_i L_{i-1} - L_{i-2} reproduces the
following scaled denominators, with k_i = floor((1 + L_{i-1}) / L_i).
Cells T_k (h = 1) and T_{k,l} (h = 2) are the convex polygons on which the
k_i are constant; they are built exactly with Fractions by clipping T with
the half-planes that encode the floor inequalities.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import structlog

from errors import CellBoundaryError, InvalidParameterError, PointOutsideTriangleError

logger = structlog.get_logger(__name__)

Number = Union[Fraction, float]
Vertex = Tuple[Number, Number]

# Closeness to an integer below which a float quotient counts as a boundary hit
BOUNDARY_EPS = 1e-9


@dataclass(frozen=True)
class TrianglePoint:
    """A point of T, exact (Fractions) or approximate (floats)."""

    x: Number
    y: Number

    def __post_init__(self) -> None:
        """Normalize ints to Fractions and check membership in T."""
        for name in ("x", "y"):
            value = getattr(self, name)
            if isinstance(value, int):
                object.__setattr__(self, name, Fraction(value))
        x, y = self.x, self.y
        if not (0 < x <= 1 and 0 < y <= 1 and x + y > 1):
            raise PointOutsideTriangleError(f"({x}, {y}) is not in the Farey triangle")

    @property
    def exact(self) -> bool:
        return isinstance(self.x, Fraction) and isinstance(self.y, Fraction)

    @classmethod
    def from_denominators(cls, qprime: int, qsecond: int, order: int) -> "TrianglePoint":
        return cls(Fraction(qprime, order), Fraction(qsecond, order))

    def as_float(self) -> Tuple[float, float]:
        return float(self.x), float(self.y)


@dataclass(frozen=True)
class CellIndex:
    """
    The vector (k_1, ..., k_h) naming a cell.

    Indices with two consecutive 1s name empty cells; they are representable
    so that empty polygons can still carry their index.
    """

    ks: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.ks:
            raise InvalidParameterError("A cell index needs at least one entry")
        if any(k < 1 for k in self.ks):
            raise InvalidParameterError(f"Cell indices must be positive, got {self.ks}")

    @property
    def h(self) -> int:
        return len(self.ks)

    def reversed(self) -> "CellIndex":
        return CellIndex(tuple(reversed(self.ks)))


@dataclass(frozen=True)
class HalfPlane:
    """a*x + b*y <= c, or < c when strict."""

    a: int
    b: int
    c: int
    strict: bool
    label: str

    def value(self, x: Number, y: Number) -> Number:
        return self.a * x + self.b * y - self.c

    def contains(self, x: Number, y: Number) -> bool:
        v = self.value(x, y)
        return v < 0 if self.strict else v <= 0


@dataclass(frozen=True)
class CellEdge:
    """Edge from start to end; owned when its points belong to the cell."""

    start: Tuple[Fraction, Fraction]
    end: Tuple[Fraction, Fraction]
    owned: bool
    label: str


@dataclass(frozen=True)
class CellPolygon:
    """
    Exact closure of a cell with per-edge ownership.

    Vertices run counterclockwise starting from the east-most vertex (lowest
    one on ties), so edge i joins vertices i and i + 1. Cells T_{k,l} also
    carry a vertex inside any straight edge where the first Phi component
    turns, so (1/4, 3/4) splits the hypotenuse edge of T_{1,3}.
    """

    index: CellIndex
    vertices: Tuple[Tuple[Fraction, Fraction], ...]
    edges: Tuple[CellEdge, ...]
    constraints: Tuple[HalfPlane, ...]
    nonempty: bool

    def contains(self, point: Union[TrianglePoint, Vertex]) -> bool:
        """Membership under the floor convention (strict edges excluded)."""
        x, y = (point.x, point.y) if isinstance(point, TrianglePoint) else point
        return all(hp.contains(x, y) for hp in self.constraints)

    def in_closure(self, point: Union[TrianglePoint, Vertex]) -> bool:
        """Membership in the closed polygon; floats get BOUNDARY_EPS of slack."""
        x, y = (point.x, point.y) if isinstance(point, TrianglePoint) else point
        slack = 0 if isinstance(x, Fraction) and isinstance(y, Fraction) else BOUNDARY_EPS
        return all(hp.value(x, y) <= slack for hp in self.constraints)

    def float_vertices(self) -> List[Tuple[float, float]]:
        return [(float(x), float(y)) for x, y in self.vertices]

    def bounding_box(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


def as_point(p: Union[TrianglePoint, Sequence[Number]]) -> TrianglePoint:
    """Accept a TrianglePoint or an (x, y) pair."""
    if isinstance(p, TrianglePoint):
        return p
    x, y = p
    return TrianglePoint(x, y)


def floor_ratio(num: Number, den: Number) -> int:
    """
    floor(num / den), snapped to the nearest integer for floats within BOUNDARY_EPS.

    Float inputs that sit on a floor jump up to rounding error take the same
    branch as the exact point would.
    """
    quotient = num / den
    if isinstance(quotient, Fraction):
        return math.floor(quotient)
    nearest = round(quotient)
    if abs(quotient - nearest) < BOUNDARY_EPS:
        return int(nearest)
    return math.floor(quotient)


def _snap(value: Number) -> Number:
    """Float chain values within BOUNDARY_EPS of 1 are 1."""
    if not isinstance(value, Fraction) and abs(value - 1) < BOUNDARY_EPS:
        return 1.0
    return value


def walk_chain(p: Union[TrianglePoint, Sequence[Number]], n: int) -> Tuple[List[Number], List[int]]:
    """
    (L_0, ..., L_n) and (k_1, ..., k_{n-1}) for the point p.

    Raises:
        InvalidParameterError: If n < 1
        CellBoundaryError: If a float chain leaves (0, 1]
    """
    if n < 1:
        raise InvalidParameterError(f"Chain length must be at least 1, got {n}")
    point = as_point(p)
    chain: List[Number] = [point.x, point.y]
    ks: List[int] = []
    for _ in range(2, n + 1):
        prev, last = chain[-2], chain[-1]
        k = floor_ratio(1 + prev, last)
        nxt = _snap(k * last - prev)
        if not 0 < nxt <= 1:
            raise CellBoundaryError(f"L-chain left (0, 1] at {point}")
        ks.append(k)
        chain.append(nxt)
    return chain, ks


def l_chain(p: Union[TrianglePoint, Sequence[Number]], n: int) -> List[Number]:
    """
    (L_0, ..., L_n) for the point p; exact when p is exact.

    Args:
        p: Point of the Farey triangle
        n: Index of the last chain entry

    Returns:
        The n + 1 chain values

    Raises:
        InvalidParameterError: If n < 1
    """
    return walk_chain(p, n)[0]


def k_vector(p: Union[TrianglePoint, Sequence[Number]], h: int) -> CellIndex:
    """(k_1, ..., k_h) with k_i = floor((1 + L_{i-1}) / L_i)."""
    if h < 1:
        raise InvalidParameterError(f"h must be at least 1, got {h}")
    chain, ks = walk_chain(p, h + 1)
    return CellIndex(tuple(ks))


def symmetry_involution(p: Union[TrianglePoint, Sequence[Number]]) -> TrianglePoint:
    """
    sigma(p) = (L_3, L_2), the mirror gamma -> 1 - gamma read on windows.

    sigma sends T_{k,l} to T_{l,k} and is its own inverse. Points are
    classified with the floor convention (floats snapped by floor_ratio);
    a point whose image does not map back to it sits on a boundary where
    the two orientations disagree.

    Raises:
        CellBoundaryError: If sigma(sigma(p)) != p
    """
    point = as_point(p)
    chain = l_chain(point, 3)
    image = TrianglePoint(chain[3], chain[2])
    back = l_chain(image, 3)
    if point.exact:
        returns = (back[3], back[2]) == (point.x, point.y)
    else:
        returns = abs(back[3] - point.x) <= BOUNDARY_EPS and abs(back[2] - point.y) <= BOUNDARY_EPS
    if not returns:
        raise CellBoundaryError(f"{point} lies on a boundary where sigma is not invertible")
    return image


# --- polygon helpers (work on Fractions and floats alike) ---


def clip_convex(vertices: Sequence[Vertex], a: Number, b: Number, c: Number) -> List[Vertex]:
    """Sutherland-Hodgman clip of a convex polygon by a*x + b*y <= c."""
    out: List[Vertex] = []
    n = len(vertices)
    if n == 0:
        return out
    s = vertices[-1]
    vs = a * s[0] + b * s[1] - c
    for e in vertices:
        ve = a * e[0] + b * e[1] - c
        if ve <= 0:
            if vs > 0:
                t = vs / (vs - ve)
                out.append((s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])))
            out.append(e)
        elif vs < 0:
            t = vs / (vs - ve)
            out.append((s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])))
        s, vs = e, ve
    return out


def polygon_area(vertices: Sequence[Vertex]) -> Number:
    """Shoelace area (exact for Fraction vertices)."""
    total: Number = 0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i - 1]
        x1, y1 = vertices[i]
        total += x0 * y1 - x1 * y0
    return abs(total) / 2


def _simplify(vertices: List[Vertex]) -> List[Vertex]:
    """Drop repeated and collinear vertices."""
    changed = True
    while changed and len(vertices) > 2:
        changed = False
        n = len(vertices)
        for i in range(n):
            p, q, r = vertices[i - 1], vertices[i], vertices[(i + 1) % n]
            cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0])
            if q == p or cross == 0:
                del vertices[i]
                changed = True
                break
    if len(vertices) == 2 and vertices[0] == vertices[1]:
        vertices = vertices[:1]
    return vertices


def _triangle_constraints() -> List[HalfPlane]:
    return [
        HalfPlane(1, 0, 1, False, "x<=1"),
        HalfPlane(0, 1, 1, False, "y<=1"),
        HalfPlane(-1, -1, -1, True, "x+y>1"),
    ]


def _strip_constraints(k: int) -> List[HalfPlane]:
    # (1 + x)/(k + 1) < y <= (1 + x)/k
    return [
        HalfPlane(-1, k, 1, False, "k-upper"),
        HalfPlane(1, -(k + 1), -1, True, "k-lower"),
    ]


def _second_strip_constraints(k: int, l: int) -> List[HalfPlane]:
    # l <= (1 + y)/(k y - x) < l + 1
    return [
        HalfPlane(-l, k * l - 1, 1, False, "l-upper"),
        HalfPlane(l + 1, -(k * (l + 1) - 1), -1, True, "l-lower"),
    ]


_TRIANGLE_VERTICES: List[Vertex] = [
    (Fraction(1), Fraction(0)),
    (Fraction(1), Fraction(1)),
    (Fraction(0), Fraction(1)),
]


def _split_at_turning_points(k: int, vertices: List[Vertex]) -> List[Vertex]:
    """
    Insert the interior point of each edge where x L_2 = x (k y - x) peaks.

    The first component of Phi_{2,2} is 3k / (pi^2 x L_2); an edge on which
    it turns maps onto a curve that is not a graph over X, so the edge is
    cut there. The polygon and its area are unchanged.
    """
    out: List[Vertex] = []
    n = len(vertices)
    for i, (x0, y0) in enumerate(vertices):
        x1, y1 = vertices[(i + 1) % n]
        out.append((x0, y0))
        dx, dl = x1 - x0, k * (y1 - y0) - (x1 - x0)
        if dx == 0 or dl == 0:
            continue
        s = -(dx * (k * y0 - x0) + x0 * dl) / (2 * dx * dl)
        if 0 < s < 1:
            out.append((x0 + s * dx, y0 + s * (y1 - y0)))
    return out


def _build_polygon(index: CellIndex, constraints: List[HalfPlane]) -> CellPolygon:
    vertices: List[Vertex] = list(_TRIANGLE_VERTICES)
    for hp in constraints:
        vertices = clip_convex(vertices, hp.a, hp.b, hp.c)
        if not vertices:
            break
    vertices = _simplify(vertices)

    area = polygon_area(vertices) if len(vertices) >= 3 else Fraction(0)
    if area > 0:
        nonempty = True
    else:
        # Degenerate closure: nonempty only if a vertex or a segment midpoint
        # passes every strict inequality.
        candidates = list(vertices)
        for i in range(len(vertices)):
            for j in range(i + 1, len(vertices)):
                (x0, y0), (x1, y1) = vertices[i], vertices[j]
                candidates.append(((x0 + x1) / 2, (y0 + y1) / 2))
        nonempty = any(all(hp.contains(x, y) for hp in constraints) for x, y in candidates)
        if not nonempty:
            vertices = []

    if len(vertices) >= 3:
        start = min(range(len(vertices)), key=lambda i: (-vertices[i][0], vertices[i][1]))
        vertices = vertices[start:] + vertices[:start]
        if index.h == 2:
            vertices = _split_at_turning_points(index.ks[0], vertices)

    edges: List[CellEdge] = []
    if len(vertices) >= 3:
        for i, u in enumerate(vertices):
            v = vertices[(i + 1) % len(vertices)]
            on_line = [hp for hp in constraints if hp.value(*u) == 0 and hp.value(*v) == 0]
            edges.append(
                CellEdge(
                    start=u,
                    end=v,
                    owned=all(not hp.strict for hp in on_line),
                    label="/".join(hp.label for hp in on_line),
                )
            )

    return CellPolygon(
        index=index,
        vertices=tuple(vertices),
        edges=tuple(edges),
        constraints=tuple(constraints),
        nonempty=nonempty,
    )


@lru_cache(maxsize=None)
def strip_polygon(k: int) -> CellPolygon:
    """The h = 1 cell T_k."""
    if k < 1:
        raise InvalidParameterError(f"k must be positive, got {k}")
    return _build_polygon(CellIndex((k,)), _triangle_constraints() + _strip_constraints(k))


@lru_cache(maxsize=None)
def cell_polygon(k: int, l: int) -> CellPolygon:
    """
    The h = 2 cell T_{k,l}: T_k cut by (1 + (l+1)x)/(k(l+1) - 1) < y <= (1 + lx)/(kl - 1).

    Empty cells (for instance (1, 1) and (3, 3)) come back with no vertices.
    """
    if k < 1 or l < 1:
        raise InvalidParameterError(f"Cell indices must be positive, got ({k}, {l})")
    index = CellIndex((k, l))
    constraints = _triangle_constraints() + _strip_constraints(k) + _second_strip_constraints(k, l)
    polygon = _build_polygon(index, constraints)
    logger.debug("cell_built", k=k, l=l, vertices=len(polygon.vertices), nonempty=polygon.nonempty)
    return polygon


def cell_area(poly: CellPolygon) -> Fraction:
    """Exact area of a cell; 0 when empty."""
    if len(poly.vertices) < 3:
        return Fraction(0)
    return Fraction(polygon_area(poly.vertices))


def is_empty(k: int, l: int) -> bool:
    """Exact feasibility test of the inequalities defining T_{k,l}."""
    return not cell_polygon(k, l).nonempty


def nonempty_cells(kmax: int, lmax: Optional[int] = None) -> Iterator[CellPolygon]:
    """
    Nonempty cells with k <= kmax and l <= lmax, in lexicographic order.

    For k >= 2 the nonempty l form an initial run 1..m, so the scan over l
    stops at the first empty cell; for k = 1 only l = 1 is empty.
    """
    lmax = kmax if lmax is None else lmax
    for k in range(1, kmax + 1):
        for l in range(1, lmax + 1):
            if is_empty(k, l):
                if k == 1:
                    continue
                break
            yield cell_polygon(k, l)
