"""
Finite-Q empirical third-gap statistics and their comparison with the limit.

Over the full interval the windows are generated from denominators alone:
a window is fixed by its first two denominators (q, q'), which run over the
coprime pairs with q + q' > Q, and the recurrence q'' = k q' - q with
k = (q + Q) // q' gives the rest. This is processed one q at a time with
numpy. Sub-intervals stream through farey_core.gap_tuples.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np
import structlog
from scipy.spatial import cKDTree

from errors import FareyError, InvalidParameterError, SequenceTooShortError
from farey_core import ONE, FareyFraction, SequenceParams, count, gap_tuples, prev_fraction
from phi_measure import BoxSpec, MeasureResult, measure_box
from settings import FareySettings

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class EmpiricalResult:
    """Fraction of windows whose gap tuple lies strictly inside the box."""

    q_order: int
    interval: Tuple[Fraction, Fraction]
    h: int
    box: BoxSpec
    hits: int
    windows: int

    @property
    def value(self) -> float:
        return self.hits / self.windows


@dataclass
class HistogramGrid:
    """
    2-D counts of (g1, g2) pairs.

    counts[i, j] holds pairs with g1 in x-bin i and g2 in y-bin j. Pairs
    outside the ranges are not binned but are counted in ``dropped``, so
    counts.sum() + dropped == total.
    """

    x_range: Tuple[float, float]
    y_range: Tuple[float, float]
    bins: Tuple[int, int]
    counts: np.ndarray
    total: int
    dropped: int


@dataclass(frozen=True)
class ConvergenceRow:
    order: int
    empirical: float
    limit: float
    diff: float
    scaled_diff: float  # |diff| * Q / log Q


def _check_length(params: SequenceParams, h: int) -> int:
    if h < 1:
        raise InvalidParameterError(f"h must be at least 1, got {h}")
    n = count(params)
    if n < h + 2:
        raise SequenceTooShortError(
            f"F_{params.order} on [{params.lo}, {params.hi}] has {n} terms; "
            f"h = {h} needs at least {h + 2}"
        )
    return n


def _excluded_starts(order: int, h: int) -> Set[Tuple[int, int]]:
    """Denominator pairs starting the h windows that would run past 1/1."""
    starts = set()
    nxt, curr = ONE, FareyFraction(order - 1, order) if order > 1 else FareyFraction(0, 1)
    for _ in range(h):
        starts.add((curr.q, nxt.q))
        if curr.a == 0:
            break
        curr, nxt = prev_fraction(curr, nxt, order), curr
    return starts


def _full_blocks(order: int, h: int, n: int) -> Iterator[np.ndarray]:
    """Gap-tuple blocks (one per first denominator) for the full interval."""
    excluded = _excluded_starts(order, h)
    for q0 in range(1, order + 1):
        q1 = np.arange(order - q0 + 1, order + 1, dtype=np.int64)
        q1 = q1[np.gcd(q1, q0) == 1]
        for a, b in excluded:
            if a == q0:
                q1 = q1[q1 != b]
        if q1.size == 0:
            continue
        prev = np.full(q1.size, q0, dtype=np.int64)
        curr = q1
        block = np.empty((q1.size, h))
        for i in range(h):
            k = (prev + order) // curr
            nxt = k * curr - prev
            block[:, i] = (n * k) / (prev * nxt)
            prev, curr = curr, nxt
        yield block


def iter_gap_blocks(params: SequenceParams, h: int, block_size: int = 65536) -> Iterator[np.ndarray]:
    """
    All normalized third-gap windows of F_Q(I) as float blocks of shape (m, h).

    Full-interval blocks are not in sequence order; sub-interval blocks are.

    Args:
        params: Order Q and interval I
        h: Window length
        block_size: Rows per block on the sub-interval path

    Yields:
        Float arrays of shape (m, h) with m <= block_size

    Raises:
        InvalidParameterError: If h < 1
        SequenceTooShortError: If N_I(Q) < h + 2
    """
    n = _check_length(params, h)
    if params.is_full:
        yield from _full_blocks(params.order, h, n)
        return
    buffer: List[Tuple[float, ...]] = []
    for window in gap_tuples(params, h):
        buffer.append(window.values)
        if len(buffer) >= block_size:
            yield np.asarray(buffer, dtype=float)
            buffer = []
    if buffer:
        yield np.asarray(buffer, dtype=float)


def gap_array(params: SequenceParams, h: int) -> np.ndarray:
    """All windows stacked into one (N - h - 1, h) array."""
    blocks = list(iter_gap_blocks(params, h))
    return np.concatenate(blocks) if blocks else np.empty((0, h))


def _in_box(block: np.ndarray, box: BoxSpec) -> np.ndarray:
    mask = np.ones(len(block), dtype=bool)
    for i, (alpha, beta) in enumerate(box.bounds):
        mask &= (block[:, i] > alpha) & (block[:, i] < beta)
    return mask


def empirical_measure(params: SequenceParams, h: int, box: BoxSpec) -> EmpiricalResult:
    """
    mu^{Q,I}_{2,h}(box): share of the N - h - 1 windows strictly inside the box.

    Args:
        params: Order Q and interval I
        h: Window length, equal to the number of box axes
        box: Open box; infinite upper bounds are allowed

    Returns:
        EmpiricalResult with the hit and window counts

    Raises:
        InvalidParameterError: If box.h != h
        SequenceTooShortError: If N_I(Q) < h + 2
        FareyError: If the window count disagrees with N_I(Q) - h - 1
    """
    if box.h != h:
        raise InvalidParameterError(f"Box has {box.h} axes, expected {h}")
    n = _check_length(params, h)
    hits = 0
    windows = 0
    for block in iter_gap_blocks(params, h):
        hits += int(_in_box(block, box).sum())
        windows += len(block)
    if windows != n - h - 1:
        raise FareyError(f"Expected {n - h - 1} windows of F_{params.order}, got {windows}")

    logger.info(
        "empirical_measure",
        order=params.order,
        interval=[str(params.lo), str(params.hi)],
        h=h,
        hits=hits,
        windows=windows,
    )
    return EmpiricalResult(params.order, params.interval, h, box, hits, windows)


def histogram2d(params: SequenceParams, bins: Tuple[int, int], range_box: BoxSpec) -> HistogramGrid:
    """
    Bin all consecutive third-gap pairs (h = 2 windows) on a regular grid.

    Args:
        params: Order Q and interval I
        bins: Bin counts along g1 and g2
        range_box: Finite 2-D box spanned by the grid

    Returns:
        HistogramGrid; pairs outside range_box are counted in ``dropped``

    Raises:
        InvalidParameterError: If a bin count is < 1 or range_box is not 2-D and finite
        SequenceTooShortError: If N_I(Q) < 4
    """
    nx, ny = bins
    if nx < 1 or ny < 1:
        raise InvalidParameterError(f"Bin counts must be positive, got {bins}")
    if range_box.h != 2 or not range_box.finite:
        raise InvalidParameterError("Histogram range must be a finite 2-D box")

    pairs = gap_array(params, 2)
    (x0, x1), (y0, y1) = range_box.bounds
    counts, _, _ = np.histogram2d(pairs[:, 0], pairs[:, 1], bins=(nx, ny), range=[[x0, x1], [y0, y1]])
    counts = counts.astype(np.int64)
    total = len(pairs)
    return HistogramGrid(
        x_range=(x0, x1),
        y_range=(y0, y1),
        bins=(nx, ny),
        counts=counts,
        total=total,
        dropped=total - int(counts.sum()),
    )


def convergence_series(
    q_list: Sequence[int],
    box: BoxSpec,
    h: int = 2,
    interval: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(1)),
    limit: Optional[MeasureResult] = None,
    settings: Optional[FareySettings] = None,
) -> List[ConvergenceRow]:
    """
    Empirical against limiting measure for increasing Q.

    The last column |diff| Q / log Q should stay bounded when the error is
    O(log Q / Q).

    Args:
        q_list: Strictly increasing orders
        box: Finite box with h axes
        h: Window length
        interval: Interval I, shared by every order
        limit: Precomputed limiting measure of the box; computed when None
        settings: Passed to measure_box when limit is None

    Returns:
        One ConvergenceRow per order, in q_list order

    Raises:
        InvalidParameterError: If q_list is not increasing or the box is unbounded
    """
    if list(q_list) != sorted(set(q_list)) or not q_list:
        raise InvalidParameterError("q_list must be strictly increasing and nonempty")
    if not box.finite:
        raise InvalidParameterError("Convergence needs a finite box")
    limit = limit or measure_box(box, h=h, settings=settings)

    rows = []
    for order in q_list:
        result = empirical_measure(SequenceParams(order, interval), h, box)
        diff = abs(result.value - limit.value)
        scaled = diff * order / math.log(order) if order > 1 else math.inf
        rows.append(ConvergenceRow(order, result.value, limit.value, diff, scaled))
        logger.info("convergence_row", order=order, empirical=result.value, diff=diff)
    return rows


def support_proximity(points: np.ndarray, cloud: np.ndarray, radius: float) -> float:
    """
    Share of points lying within radius of some point of the cloud.

    Returns 1.0 for no points and 0.0 for an empty cloud.
    """
    if len(points) == 0:
        return 1.0
    if len(cloud) == 0:
        return 0.0
    distances, _ = cKDTree(cloud).query(points, k=1)
    return float(np.mean(distances <= radius))
