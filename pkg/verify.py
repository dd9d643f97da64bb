"""
Self-check suites run by ``main.py verify``.

Each suite returns a list of CheckResult; a suite passes when every check
does. The checks compare the fast code paths with independent brute-force
or closed-form oracles.
"""

import math
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import structlog

from curve_catalog import SCALE, CurveFamily, CurveSpec, curve_catalog, curve_eval
from errors import CellBoundaryError, InvalidParameterError
from farey_core import (
    SequenceParams,
    count,
    delta,
    farey_sequence,
    inverse_membership,
)
from phi_measure import BoxSpec, edge_image_sample, measure_box, phi
from settings import FareySettings, get_settings
from triangle_cells import (
    TrianglePoint,
    cell_area,
    cell_polygon,
    is_empty,
    k_vector,
    l_chain,
    nonempty_cells,
    symmetry_involution,
)

logger = structlog.get_logger(__name__)

EXCEPTIONAL_CELLS = {(2, 2), (2, 3), (2, 4), (3, 2), (4, 2)}
TABLE_TOLERANCE = 1e-9
FAMILY_PARAMETERS = range(5, 13)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


def _timed(name: str, fn: Callable[[], Tuple[bool, str]]) -> CheckResult:
    start = time.perf_counter()
    passed, detail = fn()
    result = CheckResult(name, passed, detail, time.perf_counter() - start)
    logger.info("check", name=name, passed=passed, detail=detail, seconds=round(result.seconds, 3))
    return result


def brute_force_sequence(order: int) -> List[Fraction]:
    return sorted({Fraction(a, q) for q in range(1, order + 1) for a in range(q + 1)})


# --- recurrence ---


def _check_enumeration(limit: int) -> Tuple[bool, str]:
    for order in range(1, limit + 1):
        produced = [f.value for f in farey_sequence(SequenceParams(order))]
        if produced != brute_force_sequence(order):
            return False, f"mismatch at Q = {order}"
    return True, f"Q <= {limit}"


def _check_delta_identities(limit: int) -> Tuple[bool, str]:
    for order in range(2, limit + 1):
        seq = list(farey_sequence(SequenceParams(order)))
        for f, g, h in zip(seq, seq[1:], seq[2:]):
            if delta(f, g) != 1:
                return False, f"delta({f}, {g}) != 1 at Q = {order}"
            if delta(f, h) != (f.q + order) // g.q:
                return False, f"k identity fails at {f}, {g}, {h}, Q = {order}"
    return True, f"Q <= {limit}"


def _check_l_chain(limit: int) -> Tuple[bool, str]:
    for order in range(2, limit + 1):
        qs = [f.q for f in farey_sequence(SequenceParams(order))]
        for j in range(len(qs) - 5):
            chain = l_chain(TrianglePoint.from_denominators(qs[j], qs[j + 1], order), 5)
            if any(order * chain[i] != qs[j + i] for i in range(6)):
                return False, f"q_(j+i) != Q L_i at j = {j}, Q = {order}"
    return True, f"Q <= {limit}, i <= 5"


def _check_inverse_membership(limit: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(7)
    for order in range(2, limit + 1, max(1, limit // 20)):
        seq = list(farey_sequence(SequenceParams(order)))
        for _ in range(3):
            lo, hi = sorted(Fraction(int(v), 997) for v in rng.integers(0, 998, size=2))
            if lo == hi:
                continue
            for f, g in zip(seq, seq[1:]):
                direct = lo <= g.value <= hi
                if inverse_membership(f.q, g.q, (lo, hi)) != direct:
                    return False, f"disagrees at ({f.q}, {g.q}), Q = {order}"
    return True, f"Q <= {limit}"


def _check_cardinality() -> Tuple[bool, str]:
    worst = 0.0
    for order, bound in ((1000, 0.01), (10000, 0.003)):
        ratio = math.pi**2 * count(SequenceParams(order)) / (3 * order**2)
        worst = max(worst, abs(ratio - 1))
        if abs(ratio - 1) > bound:
            return False, f"Q = {order}: ratio {ratio:.6f}"
    return True, f"max |ratio - 1| = {worst:.2e}"


def suite_recurrence(limit: int) -> List[CheckResult]:
    return [
        _timed("enumeration matches brute force", lambda: _check_enumeration(limit)),
        _timed("delta and k identities", lambda: _check_delta_identities(limit)),
        _timed("L-chain reproduces denominators", lambda: _check_l_chain(min(limit, 200))),
        _timed("inverse membership", lambda: _check_inverse_membership(min(limit, 200))),
        _timed("cardinality asymptotic", _check_cardinality),
    ]


# --- cells ---


def _check_classification(limit: int) -> Tuple[bool, str]:
    found = {(k, l) for k in range(1, limit + 1) for l in range(1, limit + 1) if not is_empty(k, l)}
    expected = (
        {(1, l) for l in range(2, limit + 1)}
        | {(k, 1) for k in range(2, limit + 1)}
        | {c for c in EXCEPTIONAL_CELLS if max(c) <= limit}
    )
    if found != expected:
        extra = sorted(found - expected)[:5]
        missing = sorted(expected - found)[:5]
        return False, f"unexpected {extra}, missing {missing}"
    return True, f"{len(found)} nonempty cells with k, l <= {limit}"


def _check_emptiness_vs_area(limit: int) -> Tuple[bool, str]:
    for k in range(1, limit + 1):
        for l in range(1, limit + 1):
            if is_empty(k, l) != (cell_area(cell_polygon(k, l)) == 0):
                return False, f"({k}, {l}) disagrees"
    return True, f"k, l <= {limit}"


def uncovered_tail(limit: int) -> Fraction:
    """
    Area of T outside every cell with k, l <= limit.

    Valid for limit >= 4. For k >= 5 only T_{k,1} is nonempty, so the cells
    with k > limit fill the triangle below y = (1 + x)/(limit + 1), of area
    2/((limit + 1)(limit + 2)); sigma gives the same area for l > limit.
    """
    return Fraction(4, (limit + 1) * (limit + 2))


def _check_areas(limit: int = 60) -> Tuple[bool, str]:
    area22 = cell_area(cell_polygon(2, 2))
    if area22 != Fraction(1, 10):
        return False, f"area of (2, 2) is {area22}"
    total = sum(cell_area(poly) for poly in nonempty_cells(limit))
    if total + uncovered_tail(limit) != Fraction(1, 2):
        return False, f"area sum {float(total):.6f} plus tail {float(uncovered_tail(limit)):.3e} is not 1/2"
    return True, f"area(2,2) = 1/10, sum = {float(total):.6f} = 1/2 - {float(uncovered_tail(limit)):.3e}"


def _check_partition(samples: int, seed: int, limit: int = 64) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    cells = list(nonempty_cells(limit))
    cell_k = np.array([poly.index.ks[0] for poly in cells])
    cell_l = np.array([poly.index.ks[1] for poly in cells])

    pts = rng.random((3 * samples, 2))
    x, y = pts[:, 0], pts[:, 1]
    keep = (x + y > 1) & (x > 0) & (y > 0)
    x, y = x[keep], y[keep]
    k = np.floor((1 + x) / y)
    l = np.floor((1 + y) / (k * y - x))
    keep = (k <= limit) & (l <= limit)
    x, y, k, l = x[keep][:samples], y[keep][:samples], k[keep][:samples], l[keep][:samples]

    hits = np.zeros(x.size, dtype=int)
    owner = np.full(x.size, -1)
    for i, poly in enumerate(cells):
        inside = np.ones(x.size, dtype=bool)
        for hp in poly.constraints:
            value = hp.a * x + hp.b * y - hp.c
            inside &= value < 0 if hp.strict else value <= 0
        hits += inside
        owner[inside] = i
    if (hits != 1).any():
        j = int(np.argmax(hits != 1))
        return False, f"({x[j]}, {y[j]}) lies in {hits[j]} cells"
    wrong = (cell_k[owner] != k) | (cell_l[owner] != l)
    if wrong.any():
        j = int(np.argmax(wrong))
        return False, f"({x[j]}, {y[j]}) has k-vector ({k[j]:.0f}, {l[j]:.0f}) but lies in {cells[owner[j]].index.ks}"
    return True, f"{x.size} random points, each in exactly one cell"


def suite_cells(limit: int, settings: FareySettings) -> List[CheckResult]:
    return [
        _timed("emptiness classification", lambda: _check_classification(limit)),
        _timed("is_empty agrees with zero area", lambda: _check_emptiness_vs_area(limit)),
        _timed("cell areas", _check_areas),
        _timed("cells partition the triangle", lambda: _check_partition(100_000, settings.seed)),
    ]


# --- Table 1 ---


def table_rows(parameters=FAMILY_PARAMETERS) -> List[CurveSpec]:
    """Concrete rows plus family rows instantiated at each parameter."""
    rows: List[CurveSpec] = []
    for row in curve_catalog():
        if isinstance(row, CurveFamily):
            rows.extend(row.instantiate(v) for v in parameters if row.accepts(v))
        else:
            rows.append(row)
    return rows


def curve_deviation(spec: CurveSpec, samples: int) -> float:
    """Max relative gap between edge images and the closed-form curve."""
    k, l = spec.cell
    worst = 0.0
    for x_img, y_img in edge_image_sample(k, l, spec.edge_index, samples):
        _, y_curve = curve_eval(spec, x_img / SCALE)
        worst = max(worst, abs(y_curve - y_img) / abs(y_img))
    return worst


def _check_endpoints(rows: List[CurveSpec]) -> Tuple[bool, str]:
    for spec in rows:
        poly = cell_polygon(*spec.cell)
        edge = poly.edges[spec.edge_index]
        if (edge.start, edge.end) != spec.edge:
            return False, f"{spec.cell} edge {spec.edge_index} is {edge.start}->{edge.end}"
    return True, f"{len(rows)} rows"


def _check_table(rows: List[CurveSpec], samples: int) -> Tuple[bool, str]:
    worst = 0.0
    where = None
    for spec in rows:
        deviation = curve_deviation(spec, samples)
        if deviation > worst:
            worst, where = deviation, (spec.cell, spec.edge_index)
    passed = worst <= TABLE_TOLERANCE
    return passed, f"max deviation {worst:.3e} at {where}"


def suite_table1(samples: int = 200) -> List[CheckResult]:
    rows = table_rows()
    return [
        _timed("row endpoints are cell edges", lambda: _check_endpoints(rows)),
        _timed("curves match edge images", lambda: _check_table(rows, samples)),
    ]


# --- symmetry ---


def _check_phi_swap(samples: int, seed: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    checked = skipped = 0
    worst = 0.0
    while checked < samples:
        x, y = (float(v) for v in rng.random(2))
        if x + y <= 1 or x == 0 or y == 0:
            continue
        try:
            image = symmetry_involution((x, y))
            back = symmetry_involution(image)
        except CellBoundaryError:
            skipped += 1
            continue
        if k_vector(image, 2).ks != tuple(reversed(k_vector((x, y), 2).ks)):
            return False, f"k-vector not reversed at ({x}, {y})"
        if abs(back.x - x) > 1e-9 or abs(back.y - y) > 1e-9:
            return False, f"sigma is not an involution at ({x}, {y})"
        p1, p2 = phi((x, y), 2)
        s1, s2 = phi(image, 2)
        worst = max(worst, abs(s1 - p2) / p2, abs(s2 - p1) / p1)
        checked += 1
    return worst <= 1e-12, f"max relative deviation {worst:.2e} ({skipped} boundary points skipped)"


def exact_pair_rows(order: int) -> np.ndarray:
    """
    Reduced (n1, d1, n2, d2) of every h = 2 window of F_Q, unscaled.

    The common factor N is dropped; windows run over denominator pairs.
    """
    rows = []
    for q0 in range(1, order + 1):
        q1 = np.arange(order - q0 + 1, order + 1, dtype=np.int64)
        q1 = q1[np.gcd(q1, q0) == 1]
        q0s = np.full(q1.size, q0, dtype=np.int64)
        k1 = (q0s + order) // q1
        q2 = k1 * q1 - q0s
        k2 = (q1 + order) // q2
        q3 = k2 * q2 - q1
        d1, d2 = q0s * q2, q1 * q3
        g1, g2 = np.gcd(k1, d1), np.gcd(k2, d2)
        rows.append(np.column_stack((k1 // g1, d1 // g1, k2 // g2, d2 // g2)))
    return np.concatenate(rows)


def _check_pair_multiset(limit: int) -> Tuple[bool, str]:
    for order in range(2, limit + 1):
        seq = list(farey_sequence(SequenceParams(order)))
        if len(seq) < 4:
            continue
        rows = exact_pair_rows(order)
        # drop the two windows that wrap past 1/1
        last = {(seq[-2].q, seq[-1].q), (seq[-3].q, seq[-2].q)}
        forward = Counter()
        for n1, d1, n2, d2 in rows.tolist():
            forward[(n1, d1, n2, d2)] += 1
        for a, b in last:
            k1 = (a + order) // b
            q2 = k1 * b - a
            k2 = (b + order) // q2
            q3 = k2 * q2 - b
            g1 = Fraction(k1, a * q2)
            g2 = Fraction(k2, b * q3)
            forward[(g1.numerator, g1.denominator, g2.numerator, g2.denominator)] -= 1
        forward = +forward
        swapped = Counter({(n2, d2, n1, d1): c for (n1, d1, n2, d2), c in forward.items()})
        if forward != swapped:
            return False, f"pair multiset not symmetric at Q = {order}"
    return True, f"Q <= {limit}"


def suite_symmetry(limit: int, settings: FareySettings) -> List[CheckResult]:
    return [
        _timed("Phi o sigma = swap o Phi", lambda: _check_phi_swap(10_000, settings.seed)),
        _timed("gap pairs are swap invariant", lambda: _check_pair_multiset(limit)),
    ]


# --- convergence ---


def _check_convergence(q_list: List[int], settings: FareySettings) -> Tuple[bool, str]:
    from empirics import convergence_series

    box = BoxSpec(((0.7, 1.2), (0.7, 1.2)))
    limit = measure_box(box, h=2, settings=settings)
    rows = convergence_series(q_list, box, h=2, limit=limit, settings=settings)
    scaled = [row.scaled_diff for row in rows]
    tail = scaled[-3:]
    increasing = len(tail) == 3 and tail[0] < tail[1] < tail[2]
    detail = ", ".join(f"Q={r.order}: {r.diff:.2e}" for r in rows)
    return not increasing and all(math.isfinite(s) for s in scaled), detail


def suite_convergence(limit: int, settings: FareySettings) -> List[CheckResult]:
    q_list = [q for q in (100, 200, 400, 800, 1600, 3200) if q <= max(limit, 100)]
    return [_timed("empirical measure converges", lambda: _check_convergence(q_list, settings))]


SUITES: Dict[str, str] = {
    "recurrence": "Farey enumeration, delta and L-chain identities",
    "cells": "emptiness classification, areas and partition",
    "table1": "boundary curve catalog against edge images",
    "symmetry": "sigma involution and swap invariance",
    "convergence": "empirical measures approach the limit",
}


def run_suite(name: str, limit: Optional[int] = None, settings: Optional[FareySettings] = None) -> List[CheckResult]:
    """
    Run one suite by name.

    Raises:
        InvalidParameterError: If the suite name is unknown
    """
    settings = settings or get_settings()
    if name == "recurrence":
        return suite_recurrence(limit or 300)
    if name == "cells":
        return suite_cells(limit or 50, settings)
    if name == "table1":
        return suite_table1()
    if name == "symmetry":
        return suite_symmetry(limit or 300, settings)
    if name == "convergence":
        return suite_convergence(limit or 3200, settings)
    raise InvalidParameterError(f"Unknown suite {name!r}; choose from {', '.join(SUITES)}")


# Boxes with recorded Monte Carlo golden values (scripts/golden_values.py).
# (0.55, 0.9)^2 straddles the beak of the support at 6/pi^2.
CANONICAL_BOXES: Tuple[BoxSpec, ...] = (
    BoxSpec(((0.7, 1.2), (0.7, 1.2))),
    BoxSpec(((0.55, 0.9), (0.55, 0.9))),
    BoxSpec(((1.0, 2.0), (0.5, 1.5))),
    BoxSpec(((0.5, 3.0), (0.5, 3.0))),
    BoxSpec(((2.0, 4.0), (0.6, 1.0))),
)
