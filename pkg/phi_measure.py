"""
The limiting map Phi_{2,h} and the measure mu_{2,h}(C) = 2 Area(Phi^{-1}(C)).

Phi sends a point of the Farey triangle to the h-tuple of limiting
normalized third gaps, (3/pi^2) k_i / (L_{i-1} L_{i+1}). On each cell the
k_i are constant and the L_i are linear, so a box preimage is cut out of
each cell polygon by smooth curves; its area is found by quadtree
subdivision with interval bounds, and checked by seeded Monte Carlo.
"""

import heapq
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from errors import (
    EmptyCellError,
    InvalidParameterError,
    MeasureConvergenceError,
    PointOutsideTriangleError,
)
from settings import FareySettings, get_settings
from triangle_cells import (
    BOUNDARY_EPS,
    CellPolygon,
    TrianglePoint,
    as_point,
    cell_polygon,
    clip_convex,
    k_vector,
    nonempty_cells,
    polygon_area,
    strip_polygon,
    walk_chain,
)

logger = structlog.get_logger(__name__)

SCALE = 3 / math.pi**2
SUPPORT_MIN = 6 / math.pi**2

# Inward offset (as a fraction of the distance to the centroid) for edge samples
EDGE_OFFSET = 1e-12
# R2 low-discrepancy sequence: the plastic number
PLASTIC = 1.32471795724474602596

MC_CHUNK = 250_000


class MeasureMethod(str, Enum):
    ADAPTIVE = "adaptive-subdivision"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class BoxSpec:
    """Product of open intervals (alpha_i, beta_i) in normalized gap units."""

    bounds: Tuple[Tuple[float, float], ...]

    def __post_init__(self) -> None:
        """Validate each axis; beta may be math.inf."""
        if not self.bounds:
            raise InvalidParameterError("A box needs at least one axis")
        normalized = []
        for alpha, beta in self.bounds:
            alpha, beta = float(alpha), float(beta)
            if math.isnan(alpha) or math.isnan(beta):
                raise InvalidParameterError("Box bounds must be numbers")
            if alpha < 0:
                raise InvalidParameterError(f"Lower bound must be >= 0, got {alpha}")
            if not alpha < beta:
                raise InvalidParameterError(f"Empty interval ({alpha}, {beta})")
            normalized.append((alpha, beta))
        object.__setattr__(self, "bounds", tuple(normalized))

    @classmethod
    def from_flat(cls, values: Sequence[Union[float, str]]) -> "BoxSpec":
        """Build from alpha1, beta1[, alpha2, beta2 ...]; 'inf' is accepted."""
        if len(values) == 0 or len(values) % 2:
            raise InvalidParameterError("A box is given as pairs alpha,beta")
        try:
            numbers = [float(v) for v in values]
        except ValueError as e:
            raise InvalidParameterError(f"Box bounds must be numbers: {values}") from e
        return cls(tuple(zip(numbers[0::2], numbers[1::2])))

    @classmethod
    def parse(cls, text: str) -> "BoxSpec":
        return cls.from_flat([part.strip() for part in text.split(",") if part.strip()])

    @property
    def h(self) -> int:
        return len(self.bounds)

    @property
    def finite(self) -> bool:
        return all(math.isfinite(beta) for _, beta in self.bounds)

    def contains(self, values: Sequence[float]) -> bool:
        return all(alpha < v < beta for v, (alpha, beta) in zip(values, self.bounds))

    def replace_axis(self, axis: int, interval: Tuple[float, float]) -> "BoxSpec":
        bounds = list(self.bounds)
        bounds[axis] = interval
        return BoxSpec(tuple(bounds))

    def drop_axis(self, axis: int) -> Optional["BoxSpec"]:
        bounds = self.bounds[:axis] + self.bounds[axis + 1 :]
        return BoxSpec(bounds) if bounds else None


@dataclass
class MeasureResult:
    """A measure value with its error envelope."""

    value: float
    error_bound: float
    method: MeasureMethod
    cells_visited: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    def interval(self) -> Tuple[float, float]:
        """Envelope clamped to [0, 1]."""
        return (
            max(0.0, self.value - self.error_bound),
            min(1.0, self.value + self.error_bound),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "error_bound": self.error_bound,
            "method": self.method.value,
            "cells_visited": self.cells_visited,
        }


# --- the map ---


def phi(p: Union[TrianglePoint, Sequence[float]], h: int) -> Tuple[float, ...]:
    """
    Phi_{2,h}(p); exact intermediate arithmetic when p is exact.

    Raises:
        InvalidParameterError: If h < 1
    """
    if h < 1:
        raise InvalidParameterError(f"h must be at least 1, got {h}")
    chain, ks = walk_chain(p, h + 1)
    return tuple(
        SCALE * float(k / (chain[i - 1] * chain[i + 1])) for i, k in enumerate(ks, start=1)
    )


def phi_array(x: np.ndarray, y: np.ndarray, h: int) -> np.ndarray:
    """Vectorized Phi_{2,h} over float arrays; returns shape (n, h)."""
    prev = np.asarray(x, dtype=float)
    curr = np.asarray(y, dtype=float)
    out = np.empty((prev.size, h))
    for i in range(h):
        quotient = (1.0 + prev) / curr
        nearest = np.rint(quotient)
        k = np.where(np.abs(quotient - nearest) < BOUNDARY_EPS, nearest, np.floor(quotient))
        nxt = k * curr - prev
        nxt = np.where(np.abs(nxt - 1.0) < BOUNDARY_EPS, 1.0, nxt)
        out[:, i] = SCALE * k / (prev * nxt)
        prev, curr = curr, nxt
    return out


def phi22_closed_form(
    p: Union[TrianglePoint, Sequence[float]],
    k: Optional[int] = None,
    l: Optional[int] = None,
) -> Tuple[float, float]:
    """
    (3/pi^2) (k / (x z), l / (y w)) with z = k y - x and w = l z - y.

    The cell (k, l) defaults to the one containing p; passing it explicitly
    evaluates the cell's formula on the closed cell, so vertices on the
    hypotenuse x + y = 1 are accepted as one-sided limits.

    Raises:
        PointOutsideTriangleError: If p is outside the closure of cell (k, l)
    """
    if k is None or l is None:
        point = as_point(p)
        k, l = k_vector(point, 2).ks
        x, y = point.x, point.y
    else:
        x, y = (p.x, p.y) if isinstance(p, TrianglePoint) else p
        poly = cell_polygon(k, l)
        if not poly.nonempty or not poly.in_closure((x, y)):
            raise PointOutsideTriangleError(f"({x}, {y}) is not in the closure of T_{{{k},{l}}}")
    z = k * y - x
    w = l * z - y
    return SCALE * float(k / (x * z)), SCALE * float(l / (y * w))


def cell_bound_for_box(box: BoxSpec) -> Tuple[int, ...]:
    """
    Per-axis index bounds K_i = floor(pi^2 beta_i / 3).

    k_i = (pi^2/3) Phi_i L_{i-1} L_{i+1} <= (pi^2/3) beta_i, so no cell with a
    larger index meets the box.

    Raises:
        InvalidParameterError: If some beta_i is infinite
    """
    if not box.finite:
        raise InvalidParameterError("Cell bounds need a finite box; truncate it first")
    # the epsilon keeps beta = 6/pi^2 at 2 despite rounding
    return tuple(math.floor(beta / SCALE + 1e-9) for _, beta in box.bounds)


# --- adaptive subdivision ---

Rect = Tuple[float, float, float, float]
FloatPoly = List[Tuple[float, float]]


@dataclass
class _Piece:
    ks: Tuple[int, ...]
    rect: Rect
    vertices: FloatPoly
    area: float
    depth: int


def _axis_forms(ks: Tuple[int, ...], vertices: FloatPoly) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Values of L_{i-1} and L_{i+1} at the vertices, per axis."""
    pts = np.asarray(vertices)
    x, y = pts[:, 0], pts[:, 1]
    forms = []
    k = ks[0]
    z = k * y - x
    forms.append((x, z))
    if len(ks) > 1:
        l = ks[1]
        forms.append((y, l * z - y))
    return forms


def _phi_range(ks: Tuple[int, ...], vertices: FloatPoly) -> List[Tuple[float, float]]:
    """Interval enclosure of each Phi component on a convex piece."""
    ranges = []
    for index, (a, b) in zip(ks, _axis_forms(ks, vertices)):
        lo_prod = a.min() * b.min()
        hi_prod = a.max() * b.max()
        upper = math.inf if lo_prod <= 0 else SCALE * index / lo_prod
        lower = SCALE * index / hi_prod if hi_prod > 0 else math.inf
        ranges.append((lower, upper))
    return ranges


def _classify(ranges: List[Tuple[float, float]], box: BoxSpec) -> int:
    """1 inside, -1 outside, 0 undecided."""
    inside = True
    for (lo, hi), (alpha, beta) in zip(ranges, box.bounds):
        if hi <= alpha or lo >= beta:
            return -1
        if not (lo > alpha and hi < beta):
            inside = False
    return 1 if inside else 0


def _clip_to_rect(vertices: FloatPoly, rect: Rect) -> FloatPoly:
    x0, y0, x1, y1 = rect
    poly = vertices
    for a, b, c in ((1.0, 0.0, x1), (-1.0, 0.0, -x0), (0.0, 1.0, y1), (0.0, -1.0, -y0)):
        poly = clip_convex(poly, a, b, c)
        if len(poly) < 3:
            return []
    return poly


def _cells_for(box: BoxSpec) -> Iterator[CellPolygon]:
    bounds = cell_bound_for_box(box)
    if box.h == 1:
        for k in range(1, bounds[0] + 1):
            yield strip_polygon(k)
    else:
        yield from nonempty_cells(bounds[0], bounds[1])


def _measure_finite(box: BoxSpec, tol: float, max_depth: int) -> MeasureResult:
    inside_area = 0.0
    undecided_area = 0.0
    frozen_area = 0.0
    heap: List[Tuple[float, int, _Piece]] = []
    counter = itertools.count()
    cells = 0

    def admit(piece: _Piece) -> None:
        nonlocal inside_area, undecided_area
        verdict = _classify(_phi_range(piece.ks, piece.vertices), box)
        if verdict > 0:
            inside_area += piece.area
        elif verdict == 0:
            undecided_area += piece.area
            heapq.heappush(heap, (-piece.area, next(counter), piece))

    for poly in _cells_for(box):
        if len(poly.vertices) < 3:
            continue
        cells += 1
        vertices = poly.float_vertices()
        x0, y0, x1, y1 = (float(v) for v in poly.bounding_box())
        area = float(polygon_area(poly.vertices))
        admit(_Piece(poly.index.ks, (x0, y0, x1, y1), vertices, area, 0))

    while heap and undecided_area > tol:
        _, _, piece = heapq.heappop(heap)
        undecided_area -= piece.area
        if piece.depth >= max_depth:
            frozen_area += piece.area
            continue
        x0, y0, x1, y1 = piece.rect
        xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
        for rect in ((x0, y0, xm, ym), (xm, y0, x1, ym), (x0, ym, xm, y1), (xm, ym, x1, y1)):
            sub = _clip_to_rect(piece.vertices, rect)
            if not sub:
                continue
            sub_area = float(polygon_area(sub))
            if sub_area <= 0:
                continue
            admit(_Piece(piece.ks, rect, sub, sub_area, piece.depth + 1))

    undecided = max(0.0, undecided_area) + frozen_area
    result = MeasureResult(
        value=2 * inside_area + undecided,
        error_bound=undecided,
        method=MeasureMethod.ADAPTIVE,
        cells_visited=cells,
    )
    if undecided > tol:
        raise MeasureConvergenceError(
            f"Undecided area {undecided:.3g} still above {tol:.3g} at depth {max_depth}",
            partial=result,
        )
    return result


def _measure(box: Optional[BoxSpec], tol: float, max_depth: int) -> MeasureResult:
    """Finite boxes directly; infinite right ends by complement on that axis."""
    if box is None:
        return MeasureResult(1.0, 0.0, MeasureMethod.ADAPTIVE)
    for axis, (alpha, beta) in enumerate(box.bounds):
        if math.isinf(beta):
            # mu(A x (alpha, inf)) = mu(A) - mu(A x (0, alpha]); both axis
            # marginals of mu_{2,2} equal mu_{2,1}
            whole = _measure(box.drop_axis(axis), tol / 2, max_depth)
            if alpha == 0:
                return whole
            below = _measure(box.replace_axis(axis, (0.0, alpha)), tol / 2, max_depth)
            return MeasureResult(
                value=min(1.0, max(0.0, whole.value - below.value)),
                error_bound=whole.error_bound + below.error_bound,
                method=MeasureMethod.ADAPTIVE,
                cells_visited=whole.cells_visited + below.cells_visited,
            )
    return _measure_finite(box, tol, max_depth)


def measure_box(
    box: BoxSpec,
    h: int = 2,
    tol: Optional[float] = None,
    max_depth: Optional[int] = None,
    settings: Optional[FareySettings] = None,
) -> MeasureResult:
    """
    mu_{2,h}(box) = 2 Area{p in T : Phi_{2,h}(p) in box} for h = 1, 2.

    Each cell that can meet the box is refined by a quadtree on its bounding
    box, always splitting the largest undecided piece, until the undecided
    area is at most tol. The value is the midpoint of the resulting envelope.

    Raises:
        InvalidParameterError: If tol <= 0, h is not 1 or 2, or box.h != h
        MeasureConvergenceError: If the depth cap stops refinement early
    """
    settings = settings or get_settings()
    tol = settings.quad_tol if tol is None else tol
    max_depth = settings.max_depth if max_depth is None else max_depth
    if tol <= 0:
        raise InvalidParameterError(f"Tolerance must be positive, got {tol}")
    if h not in (1, 2):
        raise InvalidParameterError(f"Adaptive measure supports h = 1, 2; use Monte Carlo for h = {h}")
    if box.h != h:
        raise InvalidParameterError(f"Box has {box.h} axes, expected {h}")

    result = _measure(box, tol, max_depth)
    logger.info(
        "measure_box",
        bounds=box.bounds,
        value=result.value,
        error_bound=result.error_bound,
        cells=result.cells_visited,
    )
    return result


# --- Monte Carlo oracle ---


def _mc_chunk(box: BoxSpec, size: int, seq: np.random.SeedSequence) -> Tuple[int, int]:
    rng = np.random.default_rng(seq)
    pts = rng.random((size, 2))
    pts = pts[pts[:, 0] + pts[:, 1] > 1.0]
    if pts.size == 0:
        return 0, 0
    values = phi_array(pts[:, 0], pts[:, 1], box.h)
    mask = np.ones(len(pts), dtype=bool)
    for i, (alpha, beta) in enumerate(box.bounds):
        mask &= (values[:, i] > alpha) & (values[:, i] < beta)
    return int(mask.sum()), len(pts)


def measure_box_mc(
    box: BoxSpec,
    h: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Optional[FareySettings] = None,
) -> MeasureResult:
    """
    Rejection-sampling estimate of mu_{2,h}(box) with a 3-sigma error bound.

    Points are drawn uniformly in the unit square and kept when x + y > 1;
    the measure is the hit fraction among kept points. Chunks get their own
    spawned seed, so the result depends only on (samples, seed).

    Raises:
        InvalidParameterError: If samples < 1 or box.h != h
    """
    settings = settings or get_settings()
    h = box.h if h is None else h
    samples = settings.mc_samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    if samples < 1:
        raise InvalidParameterError(f"Sample count must be positive, got {samples}")
    if box.h != h:
        raise InvalidParameterError(f"Box has {box.h} axes, expected {h}")

    sizes = [MC_CHUNK] * (samples // MC_CHUNK)
    if samples % MC_CHUNK:
        sizes.append(samples % MC_CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        parts = list(pool.map(lambda args: _mc_chunk(box, *args), zip(sizes, seeds)))

    hits = sum(p[0] for p in parts)
    accepted = sum(p[1] for p in parts)
    if accepted == 0:
        return MeasureResult(0.0, 1.0, MeasureMethod.MONTE_CARLO)
    estimate = hits / accepted
    error = 3 * math.sqrt(estimate * (1 - estimate) / accepted)
    logger.info("measure_box_mc", bounds=box.bounds, hits=hits, accepted=accepted, value=estimate)
    return MeasureResult(
        value=estimate,
        error_bound=error,
        method=MeasureMethod.MONTE_CARLO,
        details={"hits": hits, "accepted": accepted, "seed": seed},
    )


# --- sampling the support ---


def r2_sequence(n: int, start: int = 0) -> np.ndarray:
    """Points start..start+n-1 of the R2 sequence in the unit square."""
    alpha = np.array([1 / PLASTIC, 1 / PLASTIC**2])
    i = np.arange(start, start + n, dtype=float)[:, None]
    return np.mod(0.5 + alpha * (i + 1), 1.0)


def _inside_convex(pts: np.ndarray, vertices: FloatPoly, margin: float) -> np.ndarray:
    mask = np.ones(len(pts), dtype=bool)
    n = len(vertices)
    for i in range(n):
        (x0, y0), (x1, y1) = vertices[i], vertices[(i + 1) % n]
        length = math.hypot(x1 - x0, y1 - y0)
        cross = (x1 - x0) * (pts[:, 1] - y0) - (y1 - y0) * (pts[:, 0] - x0)
        mask &= cross > margin * length
    return mask


def sample_polygon(poly: CellPolygon, n: int, margin: float = 1e-9) -> np.ndarray:
    """
    n quasi-uniform interior points of a cell (R2 sequence, rejection in the bbox).

    Fewer points come back only for slivers thinner than the margin.
    """
    vertices = poly.float_vertices()
    x0, y0, x1, y1 = (float(v) for v in poly.bounding_box())
    area = float(polygon_area(poly.vertices))
    if area <= 0 or n <= 0:
        return np.empty((0, 2))
    ratio = (x1 - x0) * (y1 - y0) / area
    batch = int(n * ratio * 1.25) + 16
    kept: List[np.ndarray] = []
    found = 0
    start = 0
    for _ in range(50):
        unit = r2_sequence(batch, start)
        start += batch
        pts = np.column_stack((x0 + unit[:, 0] * (x1 - x0), y0 + unit[:, 1] * (y1 - y0)))
        pts = pts[_inside_convex(pts, vertices, margin)]
        kept.append(pts)
        found += len(pts)
        if found >= n:
            break
    return np.concatenate(kept)[:n]


def _cell_image(ks: Tuple[int, ...], pts: np.ndarray) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    k = ks[0]
    z = k * y - x
    columns = [SCALE * k / (x * z)]
    if len(ks) > 1:
        l = ks[1]
        columns.append(SCALE * l / (y * (l * z - y)))
    return np.column_stack(columns)


def support_points(h: int, kmax: int, n_per_cell: int) -> np.ndarray:
    """
    Phi-images of quasi-uniform samples of every nonempty cell with indices <= kmax.

    For h = 1, 2 each cell is sampled separately and mapped with its own
    indices; for h >= 3 the triangle is sampled directly with kmax * n_per_cell
    points. Returns an array of shape (n, h).

    Raises:
        InvalidParameterError: If h < 1, kmax < 2 or n_per_cell < 1
    """
    if h < 1 or kmax < 2 or n_per_cell < 1:
        raise InvalidParameterError("support_points needs h >= 1, kmax >= 2, n_per_cell >= 1")

    if h >= 3:
        unit = r2_sequence(kmax * n_per_cell * 2)
        unit = unit[unit[:, 0] + unit[:, 1] > 1.0]
        return phi_array(unit[:, 0], unit[:, 1], h)

    polygons = (
        [strip_polygon(k) for k in range(1, kmax + 1)]
        if h == 1
        else list(nonempty_cells(kmax))
    )
    images = [
        _cell_image(poly.index.ks, sample_polygon(poly, n_per_cell))
        for poly in polygons
        if len(poly.vertices) >= 3
    ]
    points = np.concatenate(images) if images else np.empty((0, h))
    logger.debug("support_points", h=h, kmax=kmax, cells=len(images), points=len(points))
    return points


def edge_image_sample(
    k: int, l: int, edge_index: int, n: int, offset: float = EDGE_OFFSET
) -> List[Tuple[float, float]]:
    """
    Phi_{2,2}-images of n points on an open edge of T_{k,l}.

    Points sit at fractions (i + 1/2)/n along the edge, pulled towards the
    centroid by ``offset`` of their distance to it, and are mapped with the
    cell's own indices (k, l).

    Raises:
        EmptyCellError: If the cell is empty
        InvalidParameterError: If the edge index or n is out of range
    """
    poly = cell_polygon(k, l)
    if not poly.nonempty or len(poly.edges) == 0:
        raise EmptyCellError(f"Cell ({k}, {l}) is empty")
    if not 0 <= edge_index < len(poly.edges):
        raise InvalidParameterError(
            f"Cell ({k}, {l}) has {len(poly.edges)} edges, got index {edge_index}"
        )
    if n < 1:
        raise InvalidParameterError(f"Sample count must be positive, got {n}")

    vertices = poly.float_vertices()
    cx = sum(v[0] for v in vertices) / len(vertices)
    cy = sum(v[1] for v in vertices) / len(vertices)
    edge = poly.edges[edge_index]
    ax, ay = float(edge.start[0]), float(edge.start[1])
    bx, by = float(edge.end[0]), float(edge.end[1])

    images = []
    for i in range(n):
        s = (i + 0.5) / n
        x = ax + s * (bx - ax)
        y = ay + s * (by - ay)
        x += offset * (cx - x)
        y += offset * (cy - y)
        z = k * y - x
        w = l * z - y
        images.append((SCALE * k / (x * z), SCALE * l / (y * w)))
    return images

