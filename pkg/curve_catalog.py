"""
Closed-form boundary curves of the h = 2 support.

Each edge MN of a nonempty cell T_{k,l} is mapped by Phi_{2,2} onto a curve
that is the graph X -> Y of a function g. With t = (pi^2/3) X the scaled
ordinate (pi^2/3) Y is one of three integer-coefficient forms:

    rational-sqrt       e t / (a + b t + c sqrt(m t (m t - d)))
    rational-quadratic  e t^2 / ((u1 t + a)(u2 t + b))
    product             e t^2 / ((b1 t + c1 w)(b2 t + c2 w)),  w = sqrt(m t (m t - d))

Rows for the infinite families (1, l >= 5) and (k >= 5, 1) keep their
coefficients as functions of the family parameter and are instantiated on
demand.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple, Union

import structlog

from errors import CurveDomainError, EmptyCellError, InvalidParameterError, UnknownCurveError
from triangle_cells import cell_polygon

logger = structlog.get_logger(__name__)

SCALE = 3 / math.pi**2

Point = Tuple[Fraction, Fraction]
F = Fraction


class CurveForm(str, Enum):
    RATIONAL_SQRT = "rational-sqrt"
    RATIONAL_QUADRATIC = "rational-quadratic"
    PRODUCT = "product"


@dataclass(frozen=True)
class CurveSpec:
    """
    One boundary curve: the image of edge ``edge_index`` of cell ``cell``.

    ``t_domain[1]`` is None for domains unbounded on the right. ``branch`` is
    the sign in front of the square root (0 for rational-quadratic rows).
    ``corrected`` marks rows whose printed coefficients did not match the
    image of their edge and were rederived.
    """

    cell: Tuple[int, int]
    edge_index: int
    edge: Tuple[Point, Point]
    form: CurveForm
    coefficients: Dict[str, int] = field(hash=False)
    t_domain: Tuple[Fraction, Optional[Fraction]]
    branch: int = 0
    family: Optional[str] = None
    corrected: bool = False

    def __post_init__(self) -> None:
        lo, hi = self.t_domain
        if hi is not None and not lo < hi:
            raise InvalidParameterError(f"Empty t-domain [{lo}, {hi}] for {self.cell} edge {self.edge_index}")

    @property
    def bounded(self) -> bool:
        return self.t_domain[1] is not None


@dataclass(frozen=True)
class CurveFamily:
    """A Table row valid for every value of one cell index from ``minimum`` on."""

    name: str
    parameter: str  # "l" for cells (1, l), "k" for cells (k, 1)
    minimum: int
    maximum: Optional[int]
    edge_index: int
    form: CurveForm
    endpoints: Callable[[int], Tuple[Point, Point]]
    coefficients: Callable[[int], Dict[str, int]]
    domain: Callable[[int], Tuple[Fraction, Fraction]]

    def accepts(self, value: int) -> bool:
        return value >= self.minimum and (self.maximum is None or value <= self.maximum)

    def cell(self, value: int) -> Tuple[int, int]:
        return (1, value) if self.parameter == "l" else (value, 1)

    def instantiate(self, value: int) -> CurveSpec:
        """
        Concrete row for parameter ``value``.

        Raises:
            InvalidParameterError: If the family does not cover value
        """
        if not self.accepts(value):
            raise InvalidParameterError(
                f"Family {self.name} does not cover {self.parameter} = {value}"
            )
        coefficients = self.coefficients(value)
        lo, hi = sorted(self.domain(value))
        return CurveSpec(
            cell=self.cell(value),
            edge_index=self.edge_index,
            edge=self.endpoints(value),
            form=self.form,
            coefficients=coefficients,
            t_domain=(lo, hi),
            branch=_branch_of(self.form, coefficients),
            family=self.name,
        )


CatalogRow = Union[CurveSpec, CurveFamily]


def _branch_of(form: CurveForm, coefficients: Dict[str, int]) -> int:
    if form is CurveForm.RATIONAL_SQRT:
        return 1 if coefficients["c"] > 0 else -1
    if form is CurveForm.PRODUCT:
        return 1 if coefficients["c2"] > 0 else -1
    return 0


def _sqrt(e: int, a: int, b: int, c: int, d: int, m: int = 1) -> Dict[str, int]:
    return {"e": e, "a": a, "b": b, "c": c, "d": d, "m": m}


def _quad(e: int, a: int, b: int, u1: int = 1, u2: int = 1) -> Dict[str, int]:
    return {"e": e, "u1": u1, "a": a, "u2": u2, "b": b}


def _product(e: int, b1: int, c1: int, b2: int, c2: int, d: int, m: int = 1) -> Dict[str, int]:
    return {"e": e, "b1": b1, "c1": c1, "b2": b2, "c2": c2, "d": d, "m": m}


def _row(
    cell: Tuple[int, int],
    edge_index: int,
    start: Point,
    end: Point,
    form: CurveForm,
    coefficients: Dict[str, int],
    lo: Fraction,
    hi: Optional[Fraction],
    corrected: bool = False,
) -> CurveSpec:
    return CurveSpec(
        cell=cell,
        edge_index=edge_index,
        edge=(start, end),
        form=form,
        coefficients=coefficients,
        t_domain=(lo, hi),
        branch=_branch_of(form, coefficients),
        corrected=corrected,
    )


SQ = CurveForm.RATIONAL_SQRT
QU = CurveForm.RATIONAL_QUADRATIC
PR = CurveForm.PRODUCT


def _concrete_rows() -> List[CurveSpec]:
    return [
        # (1, 2)
        _row((1, 2), 0, (F(1, 3), F(1)), (F(0), F(1)), SQ, _sqrt(2, 0, 0, 1, 4), F(9, 2), None),
        _row((1, 2), 1, (F(0), F(1)), (F(1, 5), F(4, 5)), SQ, _sqrt(16, -12, 3, 5, 8), F(25, 3), None),
        _row((1, 2), 2, (F(1, 5), F(4, 5)), (F(1, 3), F(1)), SQ, _sqrt(16, -12, -3, 5, -8), F(9, 2), F(25, 3)),
        # (1, 3)
        _row((1, 3), 0, (F(1, 2), F(1)), (F(1, 3), F(1)), SQ, _sqrt(6, 0, 1, 3, 4), F(4), F(9, 2)),
        _row((1, 3), 1, (F(1, 3), F(1)), (F(1, 5), F(4, 5)), SQ, _sqrt(12, 0, -1, 3, -8), F(9, 2), F(25, 3)),
        _row((1, 3), 2, (F(1, 5), F(4, 5)), (F(1, 4), F(3, 4)), SQ, _sqrt(24, -20, 7, 9, 8), F(8), F(25, 3)),
        _row((1, 3), 3, (F(1, 4), F(3, 4)), (F(2, 7), F(5, 7)), SQ, _sqrt(24, -20, 7, -9, 8), F(8), F(49, 6)),
        _row((1, 3), 4, (F(2, 7), F(5, 7)), (F(1, 2), F(1)), SQ, _sqrt(54, -24, -7, 11, -12), F(4), F(49, 6)),
        # (1, 4)
        # printed as 25/6 <= t <= 4; t runs from 4 at (1/2, 1) to 25/6 at (3/5, 1)
        _row((1, 4), 0, (F(3, 5), F(1)), (F(1, 2), F(1)), SQ, _sqrt(4, 0, 1, -2, 4), F(4), F(25, 6), corrected=True),
        _row((1, 4), 1, (F(1, 2), F(1)), (F(2, 7), F(5, 7)), SQ, _sqrt(12, 0, -1, 2, -12), F(4), F(49, 6)),
        _row((1, 4), 2, (F(2, 7), F(5, 7)), (F(1, 3), F(2, 3)), SQ, _sqrt(32, -28, 11, -13, 8), F(49, 6), F(9)),
        _row((1, 4), 3, (F(1, 3), F(2, 3)), (F(3, 5), F(1)), SQ, _sqrt(128, -40, -13, 19, -16), F(25, 6), F(9)),
        # (2, 1)
        _row((2, 1), 0, (F(1), F(1)), (F(1, 3), F(2, 3)), QU, _quad(4, 2, -2), F(2), F(6)),
        _row((2, 1), 1, (F(1, 3), F(2, 3)), (F(2, 5), F(3, 5)), SQ, _sqrt(9, -12, 4, -5, 6), F(6), F(25, 4)),
        _row((2, 1), 2, (F(2, 5), F(3, 5)), (F(1), F(1)), SQ, _sqrt(9, -12, -4, 5, -6), F(2), F(25, 4)),
        # (2, 2)
        _row((2, 2), 0, (F(1), F(4, 5)), (F(1), F(1)), QU, _quad(-8, 2, -6), F(2), F(10, 3)),
        _row((2, 2), 1, (F(1), F(1)), (F(2, 5), F(3, 5)), SQ, _sqrt(6, 0, -1, 2, -6), F(2), F(25, 4)),
        _row((2, 2), 2, (F(2, 5), F(3, 5)), (F(1, 2), F(1, 2)), SQ, _sqrt(18, -30, 13, -14, 6), F(25, 4), F(8)),
        _row((2, 2), 3, (F(1, 2), F(1, 2)), (F(1), F(4, 5)), SQ, _sqrt(50, -30, -11, 14, -10), F(10, 3), F(8)),
        # (2, 3)
        _row((2, 3), 0, (F(1), F(5, 7)), (F(1), F(4, 5)), QU, _quad(-12, 2, -10), F(10, 3), F(14, 3)),
        _row((2, 3), 1, (F(1), F(4, 5)), (F(1, 2), F(1, 2)), SQ, _sqrt(30, 0, -4, 6, -10), F(10, 3), F(8)),
        _row((2, 3), 2, (F(1, 2), F(1, 2)), (F(4, 5), F(3, 5)), SQ, _sqrt(27, 24, -2, 7, 6), F(25, 4), F(8)),
        _row((2, 3), 3, (F(4, 5), F(3, 5)), (F(1), F(5, 7)), SQ, _sqrt(147, -56, -22, 27, -14), F(14, 3), F(25, 4)),
        # (2, 4)
        _row((2, 4), 0, (F(1), F(2, 3)), (F(1), F(5, 7)), QU, _quad(-16, 2, -14), F(14, 3), F(6)),
        _row((2, 4), 1, (F(1), F(5, 7)), (F(4, 5), F(3, 5)), SQ, _sqrt(28, 0, -3, 4, -14), F(14, 3), F(25, 4)),
        _row((2, 4), 2, (F(4, 5), F(3, 5)), (F(1), F(2, 3)), SQ, _sqrt(36, 30, -1, 8, 6), F(6), F(25, 4)),
        # (3, 1)
        _row((3, 1), 0, (F(1), F(3, 5)), (F(1), F(2, 3)), QU, _quad(-9, 3, -6), F(3), F(15, 4)),
        _row((3, 1), 1, (F(1), F(2, 3)), (F(1, 2), F(1, 2)), QU, _quad(9, 3, -3, u2=2), F(3), F(6)),
        _row((3, 1), 2, (F(1, 2), F(1, 2)), (F(4, 7), F(3, 7)), SQ, _sqrt(32, -72, 31, -11, 16, m=3), F(6), F(147, 20)),
        _row((3, 1), 3, (F(4, 7), F(3, 7)), (F(1), F(3, 5)), SQ, _sqrt(50, -60, -23, 9, -20, m=3), F(15, 4), F(147, 20)),
        # (3, 2)
        _row((3, 2), 0, (F(1), F(1, 2)), (F(1), F(3, 5)), QU, _quad(-18, 3, -15), F(15, 4), F(6)),
        _row((3, 2), 1, (F(1), F(3, 5)), (F(4, 7), F(3, 7)), SQ, _sqrt(10, 0, -2, 1, -20, m=3), F(15, 4), F(147, 20)),
        _row((3, 2), 2, (F(4, 7), F(3, 7)), (F(3, 5), F(2, 5)), SQ, _sqrt(64, -168, 79, -27, 16, m=3), F(147, 20), F(25, 3)),
        # printed as -72 - 11t; the edge lies on 4y = 1 + x, which gives +72
        _row((3, 2), 3, (F(3, 5), F(2, 5)), (F(1), F(1, 2)), SQ, _sqrt(64, 72, -11, 7, 16, m=3), F(6), F(25, 3), corrected=True),
        # (4, 1)
        _row((4, 1), 0, (F(1), F(3, 7)), (F(1), F(1, 2)), QU, _quad(-16, 4, -12), F(4), F(28, 5)),
        _row((4, 1), 1, (F(1), F(1, 2)), (F(3, 5), F(2, 5)), QU, _quad(16, 4, -4, u2=3), F(4), F(20, 3)),
        _row((4, 1), 2, (F(3, 5), F(2, 5)), (F(2, 3), F(1, 3)), SQ, _sqrt(25, -80, 37, -38, 5), F(20, 3), F(9)),
        _row((4, 1), 3, (F(2, 3), F(1, 3)), (F(1), F(3, 7)), SQ, _sqrt(49, -56, -23, 26, -7), F(28, 5), F(9)),
        # (4, 2)
        _row((4, 2), 0, (F(1), F(2, 5)), (F(1), F(3, 7)), QU, _quad(-32, 4, -28), F(28, 5), F(20, 3)),
        _row((4, 2), 1, (F(1), F(3, 7)), (F(2, 3), F(1, 3)), SQ, _sqrt(14, 0, -3, 4, -7), F(28, 5), F(9)),
        _row((4, 2), 2, (F(2, 3), F(1, 3)), (F(1), F(2, 5)), SQ, _sqrt(50, 60, -9, 16, 5), F(20, 3), F(9)),
    ]


def _families() -> List[CurveFamily]:
    return [
        CurveFamily(
            name="1,l>=5:0",
            parameter="l",
            minimum=5,
            maximum=None,
            edge_index=0,
            form=SQ,
            endpoints=lambda l: ((F(l - 1, l + 1), F(1)), (F(l - 2, l), F(1))),
            coefficients=lambda l: _sqrt(2 * l, 0, l - 2, -l, 4),
            domain=lambda l: (F(l * l, 2 * (l - 2)), F((l + 1) ** 2, 2 * (l - 1))),
        ),
        CurveFamily(
            name="1,l>=5:1",
            parameter="l",
            minimum=5,
            maximum=None,
            edge_index=1,
            form=SQ,
            endpoints=lambda l: ((F(l - 2, l), F(1)), (F(l - 3, l + 1), F(l - 1, l + 1))),
            coefficients=lambda l: _sqrt(2 * l * (l - 1), 0, 2 - l, l, -(4 * l - 4)),
            domain=lambda l: (F(l * l, 2 * (l - 2)), F((l + 1) ** 2, 2 * (l - 3))),
        ),
        CurveFamily(
            name="1,l>=7:2",
            parameter="l",
            minimum=7,
            maximum=None,
            edge_index=2,
            form=SQ,
            endpoints=lambda l: ((F(l - 3, l + 1), F(l - 1, l + 1)), (F(l - 2, l + 2), F(l, l + 2))),
            coefficients=lambda l: _sqrt(8 * l, 4 + 4 * l, l - 5, -(l + 3), 8),
            domain=lambda l: (F((l + 1) ** 2, 2 * (l - 3)), F((l + 2) ** 2, 2 * (l - 2))),
        ),
        CurveFamily(
            name="1,l=5,6:2",
            parameter="l",
            minimum=5,
            maximum=6,
            edge_index=2,
            form=SQ,
            endpoints=lambda l: ((F(l - 3, l + 1), F(l - 1, l + 1)), (F(l - 2, l + 2), F(l, l + 2))),
            coefficients=lambda l: _sqrt(8 * l, 4 + 4 * l, l - 5, l + 3, 8),
            domain=lambda l: (F((l + 1) ** 2, 2 * (l - 3)), F((l + 2) ** 2, 2 * (l - 2))),
        ),
        CurveFamily(
            name="1,l>=5:3",
            parameter="l",
            minimum=5,
            maximum=None,
            edge_index=3,
            form=PR,
            endpoints=lambda l: ((F(l - 2, l + 2), F(l, l + 2)), (F(l - 1, l + 1), F(1))),
            coefficients=lambda l: _product(4 * l**3, 1 - 2 * l, 1, l - 1, -(l + 1), -4 * l),
            domain=lambda l: (F((l + 1) ** 2, 2 * (l - 1)), F((l + 2) ** 2, 2 * (l - 2))),
        ),
        CurveFamily(
            name="k>=5,1:0",
            parameter="k",
            minimum=5,
            maximum=None,
            edge_index=0,
            form=QU,
            endpoints=lambda k: ((F(1), F(2, k + 1)), (F(1), F(2, k))),
            coefficients=lambda k: _quad(-k * k, -k * k + k, k),
            domain=lambda k: (F(k), F(k * (k + 1), k - 1)),
        ),
        CurveFamily(
            name="k>=5,1:1",
            parameter="k",
            minimum=5,
            maximum=None,
            edge_index=1,
            form=QU,
            endpoints=lambda k: ((F(1), F(2, k)), (F(k - 1, k + 1), F(2, k + 1))),
            coefficients=lambda k: _quad(k * k, k, -k, u2=k - 1),
            domain=lambda k: (F(k), F(k * (k + 1), k - 1)),
        ),
        CurveFamily(
            name="k>=5,1:2",
            parameter="k",
            minimum=5,
            maximum=None,
            edge_index=2,
            form=PR,
            endpoints=lambda k: ((F(k - 1, k + 1), F(2, k + 1)), (F(k, k + 2), F(2, k + 2))),
            coefficients=lambda k: _product(4 * (k + 1) ** 2, k + 2, -1, k * k - 2, -k, 4 * k + 4, m=k),
            domain=lambda k: (F(k * (k + 1), k - 1), F((k + 2) ** 2, k)),
        ),
        CurveFamily(
            name="k>=5,1:3",
            parameter="k",
            minimum=5,
            maximum=None,
            edge_index=3,
            form=PR,
            endpoints=lambda k: ((F(k, k + 2), F(2, k + 2)), (F(1), F(2, k + 1))),
            coefficients=lambda k: _product(2 * (k + 1) ** 2, 1, -1, -k - 2, 1, 4 * k + 4, m=k),
            domain=lambda k: (F(k * (k + 1), k - 1), F((k + 2) ** 2, k)),
        ),
    ]


@lru_cache(maxsize=1)
def _catalog() -> Tuple[CatalogRow, ...]:
    return tuple(_concrete_rows()) + tuple(_families())


def curve_catalog() -> List[CatalogRow]:
    """Every boundary row: concrete CurveSpecs followed by the CurveFamily rows."""
    return list(_catalog())


def rows_for_cell(k: int, l: int) -> List[CurveSpec]:
    """
    Concrete boundary rows of cell (k, l) ordered by edge index.

    Raises:
        EmptyCellError: If T_{k,l} is empty
    """
    if not cell_polygon(k, l).nonempty:
        raise EmptyCellError(f"Cell ({k}, {l}) is empty")
    rows: List[CurveSpec] = []
    for row in _catalog():
        if isinstance(row, CurveSpec):
            if row.cell == (k, l):
                rows.append(row)
        else:
            value = l if row.parameter == "l" else k
            if row.cell(value) == (k, l) and row.accepts(value):
                rows.append(row.instantiate(value))
    return sorted(rows, key=lambda r: r.edge_index)


def select_rows(selector: str) -> List[CurveSpec]:
    """
    Resolve a CLI selector: "all" (concrete rows only) or "k,l".

    Raises:
        UnknownCurveError: If the selector is malformed or names no row
        EmptyCellError: If it names an empty cell
    """
    if selector.strip().lower() == "all":
        return [row for row in _catalog() if isinstance(row, CurveSpec)]
    try:
        k, l = (int(part) for part in selector.split(","))
    except ValueError as e:
        raise UnknownCurveError(f"Row selector must be 'all' or 'k,l', got {selector!r}") from e
    if k < 1 or l < 1:
        raise UnknownCurveError(f"Row selector must name positive indices, got {selector!r}")
    rows = rows_for_cell(k, l)
    if not rows:
        raise UnknownCurveError(f"No catalog row for cell ({k}, {l})")
    return rows


def _radical(m: int, d: int, t: float) -> float:
    radicand = m * t * (m * t - d)
    if radicand < 0:
        if radicand > -1e-12 * max(1.0, (m * t) ** 2):
            return 0.0
        raise CurveDomainError(f"Square root of a negative number at t = {t}")
    return math.sqrt(radicand)


def scaled_ordinate(spec: CurveSpec, t: float) -> float:
    """(pi^2/3) Y as a function of t; no domain check."""
    c = spec.coefficients
    if spec.form is CurveForm.RATIONAL_SQRT:
        denominator = c["a"] + c["b"] * t + c["c"] * _radical(c["m"], c["d"], t)
        numerator = c["e"] * t
    elif spec.form is CurveForm.RATIONAL_QUADRATIC:
        denominator = (c["u1"] * t + c["a"]) * (c["u2"] * t + c["b"])
        numerator = c["e"] * t * t
    else:
        w = _radical(c["m"], c["d"], t)
        denominator = (c["b1"] * t + c["c1"] * w) * (c["b2"] * t + c["c2"] * w)
        numerator = c["e"] * t * t
    if denominator == 0:
        raise CurveDomainError(f"Curve {spec.cell}:{spec.edge_index} has a pole at t = {t}")
    return numerator / denominator


def curve_eval(spec: CurveSpec, t: float) -> Tuple[float, float]:
    """
    The point ((3/pi^2) t, (3/pi^2) g(t)) of the curve.

    Raises:
        CurveDomainError: If t lies outside the row's domain or the radicand is negative
    """
    lo, hi = spec.t_domain
    slack = 1e-12 * max(1.0, abs(t))
    if not math.isfinite(t) or t < lo - slack or (hi is not None and t > hi + slack):
        upper = "inf" if hi is None else str(hi)
        raise CurveDomainError(f"t = {t} is outside [{lo}, {upper}]")
    return SCALE * t, SCALE * scaled_ordinate(spec, t)
