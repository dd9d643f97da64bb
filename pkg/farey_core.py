"""
Exact enumeration of Farey sequences.

Fractions are integer pairs; the sequence is produced by the three-term
recurrence a''' = k a'' - a', q''' = k q'' - q' with k = (q' + Q) // q'',
seeded by a Stern-Brocot descent for sub-intervals. Nothing is stored, so
orders in the tens of thousands stream in constant memory.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Iterator, Tuple, Union

import numpy as np
import structlog

from errors import (
    EndOfSequenceError,
    InvalidParameterError,
    NotConsecutiveError,
    SequenceTooShortError,
)

logger = structlog.get_logger(__name__)

Rational = Union[int, float, str, Fraction]


def to_rational(value: Rational) -> Fraction:
    """Convert '1/3', '0.37', 0.25 or a Fraction to an exact Fraction."""
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidParameterError(f"Not a rational number: {value!r}") from e


@total_ordering
@dataclass(frozen=True)
class FareyFraction:
    """An irreducible fraction a/q with 0 <= a <= q."""

    a: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 1:
            raise InvalidParameterError(f"Denominator must be positive, got {self.q}")
        if not 0 <= self.a <= self.q:
            raise InvalidParameterError(f"Fraction {self.a}/{self.q} is outside [0, 1]")
        if math.gcd(self.a, self.q) != 1:
            raise InvalidParameterError(f"Fraction {self.a}/{self.q} is not reduced")

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.q)

    def __float__(self) -> float:
        return self.a / self.q

    def __lt__(self, other: "FareyFraction") -> bool:
        if not isinstance(other, FareyFraction):
            return NotImplemented
        return self.a * other.q < other.a * self.q

    def __str__(self) -> str:
        return f"{self.a}/{self.q}"


ZERO = FareyFraction(0, 1)
ONE = FareyFraction(1, 1)


@dataclass
class SequenceParams:
    """Order Q and closed interval [lo, hi] of the sequence F_Q(I)."""

    order: int
    interval: Tuple[Fraction, Fraction] = field(
        default=(Fraction(0), Fraction(1))
    )

    def __post_init__(self) -> None:
        """Validate and normalize the interval to exact rationals."""
        if not isinstance(self.order, int) or self.order < 1:
            raise InvalidParameterError(f"Order must be a positive integer, got {self.order!r}")

        lo, hi = (to_rational(v) for v in self.interval)
        if not 0 <= lo < hi <= 1:
            raise InvalidParameterError(
                f"Interval must satisfy 0 <= lo < hi <= 1, got [{lo}, {hi}]"
            )
        self.interval = (lo, hi)

    @property
    def lo(self) -> Fraction:
        return self.interval[0]

    @property
    def hi(self) -> Fraction:
        return self.interval[1]

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_full(self) -> bool:
        return self.lo == 0 and self.hi == 1


@dataclass(frozen=True)
class GapTuple:
    """
    Normalized third gaps of the window starting at gamma_j.

    values[i - 1] is (N / |I|) * (gamma_{j+i+1} - gamma_{j+i-1}), i = 1..h.
    """

    start_index: int
    values: Tuple[Union[float, Fraction], ...]


def delta(f: FareyFraction, g: FareyFraction) -> int:
    """Numerator of g - f over the unreduced denominator f.q * g.q."""
    return g.a * f.q - f.a * g.q


def _check_neighbors(left: FareyFraction, right: FareyFraction, order: int) -> None:
    if order < 1:
        raise InvalidParameterError(f"Order must be positive, got {order}")
    if (
        delta(left, right) != 1
        or left.q > order
        or right.q > order
        or left.q + right.q <= order
    ):
        raise NotConsecutiveError(f"{left} and {right} are not neighbors in F_{order}")


def next_fraction(prev: FareyFraction, curr: FareyFraction, order: int) -> FareyFraction:
    """
    Successor of curr in F_Q, given its predecessor prev.

    Raises:
        EndOfSequenceError: If curr is 1/1
        NotConsecutiveError: If prev, curr are not neighbors in F_Q
    """
    if curr == ONE:
        raise EndOfSequenceError("1/1 has no successor in [0, 1]")
    _check_neighbors(prev, curr, order)
    k = (prev.q + order) // curr.q
    return FareyFraction(k * curr.a - prev.a, k * curr.q - prev.q)


def prev_fraction(curr: FareyFraction, nxt: FareyFraction, order: int) -> FareyFraction:
    """
    Predecessor of curr in F_Q, given its successor nxt.

    Raises:
        EndOfSequenceError: If curr is 0/1
        NotConsecutiveError: If curr, nxt are not neighbors in F_Q
    """
    if curr == ZERO:
        raise EndOfSequenceError("0/1 has no predecessor in [0, 1]")
    _check_neighbors(curr, nxt, order)
    k = (nxt.q + order) // curr.q
    return FareyFraction(k * curr.a - nxt.a, k * curr.q - nxt.q)


def initial_pair(x0: Rational, order: int) -> Tuple[FareyFraction, FareyFraction]:
    """
    Neighbors (g1, g2) of F_Q with g1 <= x0 < g2.

    Stern-Brocot descent from (0/1, 1/1) where each run of equal-direction
    mediant steps is taken at once, so the loop makes O(log Q) passes.

    Raises:
        InvalidParameterError: If x0 is outside [0, 1) or order < 1
    """
    x = to_rational(x0)
    if not 0 <= x < 1:
        raise InvalidParameterError(f"Seed must lie in [0, 1), got {x}")
    if order < 1:
        raise InvalidParameterError(f"Order must be positive, got {order}")

    a1, q1, a2, q2 = 0, 1, 1, 1
    while True:
        # lower <- lower + j * upper while it stays <= x
        room = (order - q1) // q2
        step = math.floor((x * q1 - a1) / (a2 - x * q2))
        j_right = max(0, min(room, step))
        a1, q1 = a1 + j_right * a2, q1 + j_right * q2

        # upper <- upper + j * lower while it stays > x
        room = (order - q2) // q1
        slack = x * q1 - a1
        if slack == 0:
            j_left = room
        else:
            j_left = min(room, math.ceil((a2 - x * q2) / slack) - 1)
        j_left = max(0, j_left)
        a2, q2 = a2 + j_left * a1, q2 + j_left * q1

        if j_right == 0 and j_left == 0:
            break

    return FareyFraction(a1, q1), FareyFraction(a2, q2)


def iter_pairs(params: SequenceParams) -> Iterator[Tuple[int, int]]:
    """Stream (numerator, denominator) of F_Q(I) in increasing order."""
    order = params.order
    lo, hi = params.lo, params.hi
    left, right = initial_pair(lo, order)

    a, b, c, d = left.a, left.q, right.a, right.q
    if a * lo.denominator == lo.numerator * b:
        yield a, b
    while c * hi.denominator <= hi.numerator * d:
        yield c, d
        if c == d:
            break
        k = (b + order) // d
        a, b, c, d = c, d, k * c - a, k * d - b


def farey_sequence(params: SequenceParams) -> Iterator[FareyFraction]:
    """Yield F_Q intersected with [lo, hi] in strictly increasing order."""
    for a, q in iter_pairs(params):
        yield FareyFraction(a, q)


def _prime_sieve(n: int) -> np.ndarray:
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime)


def totients(n: int) -> np.ndarray:
    """Euler's phi(0..n) as an int64 array (phi(0) = 0)."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in _prime_sieve(n):
        phi[p::p] -= phi[p::p] // p
    return phi


def mobius(n: int) -> np.ndarray:
    """Moebius mu(0..n) as an int64 array (mu(0) = 0)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in _prime_sieve(n):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def count(params: SequenceParams) -> int:
    """
    Exact cardinality N_I(Q) of F_Q intersected with [lo, hi].

    The full interval uses 1 + sum(phi(q)); a sub-interval counts reduced
    lattice points a/q in [lo, hi] by Moebius inversion over common divisors.
    """
    order = params.order
    if params.is_full:
        return int(totients(order)[1:].sum()) + 1

    lo, hi = params.lo, params.hi
    mu = mobius(order)
    big = max(hi.numerator, lo.numerator) * order > 2**62
    total = 0
    for d in np.flatnonzero(mu):
        m = order // int(d)
        qs = np.arange(1, m + 1, dtype=object if big else np.int64)
        upper = (hi.numerator * qs) // hi.denominator
        lower = -((-lo.numerator * qs) // lo.denominator)
        total += int(mu[d]) * int((upper - lower + 1).sum())
    return total


def gap_tuples(
    params: SequenceParams, h: int, exact: bool = False
) -> Iterator[GapTuple]:
    """
    Windows of h consecutive normalized third gaps, for j = 1 .. N - h - 1.

    Each gap is (N / |I|) * k / (q_prev * q_next) where k = delta(prev, next).
    With exact=True the values are Fractions, otherwise floats. Arguments are
    checked on the call; the windows themselves are produced lazily.

    Raises:
        InvalidParameterError: If h < 1
        SequenceTooShortError: If N_I(Q) < h + 2
    """
    if h < 1:
        raise InvalidParameterError(f"h must be at least 1, got {h}")
    n = count(params)
    if n < h + 2:
        raise SequenceTooShortError(
            f"F_{params.order} on [{params.lo}, {params.hi}] has {n} terms; "
            f"h = {h} needs at least {h + 2}"
        )
    return _windows(params, h, n, exact)


def _windows(params: SequenceParams, h: int, n: int, exact: bool) -> Iterator[GapTuple]:
    scale = Fraction(n) / params.length
    scale_f = float(scale)
    window: deque = deque(maxlen=h)

    stream = iter_pairs(params)
    a0, q0 = next(stream)
    a1, q1 = next(stream)
    m = 1
    for a2, q2 in stream:
        m += 1
        k = a2 * q0 - a0 * q2
        if exact:
            window.append(scale * k / (q0 * q2))
        else:
            window.append(scale_f * k / (q0 * q2))
        if len(window) == h:
            yield GapTuple(start_index=m - h, values=tuple(window))
        a0, q0, a1, q1 = a1, q1, a2, q2


def inverse_membership(
    qprime: int, qsecond: int, interval: Tuple[Rational, Rational]
) -> bool:
    """
    Whether the fraction a''/q'' that follows denominator q' lies in the interval.

    Neighbors satisfy a'' q' - a' q'' = 1, so a'' is the inverse of q' modulo q''
    (and a''/q'' = 1/1 when q'' = 1).

    Raises:
        InvalidParameterError: If gcd(q', q'') != 1 or an input is not positive
    """
    if qprime < 1 or qsecond < 1:
        raise InvalidParameterError("Denominators must be positive")
    if math.gcd(qprime, qsecond) != 1:
        raise InvalidParameterError(f"Denominators {qprime}, {qsecond} are not coprime")

    lo, hi = (to_rational(v) for v in interval)
    numerator = 1 if qsecond == 1 else pow(qprime, -1, qsecond)
    return lo <= Fraction(numerator, qsecond) <= hi
