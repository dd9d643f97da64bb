"""
Serialization of command output: CSV, JSON and static SVG.

Everything is written with LF line endings and floats with 17 significant
digits, so repeated runs with the same arguments produce identical bytes.
"""

import csv
import io
import json
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Any, Iterable, Iterator, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import structlog

from errors import InvalidParameterError

logger = structlog.get_logger(__name__)

SUPPORT_MIN = 6 / math.pi**2

SVG_SIZE = 800
SVG_MARGIN = 40
SVG_VIEW = (0.0, 5.0)


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


@dataclass(frozen=True)
class OutputSpec:
    """Where and how a command writes its result; path None means stdout."""

    format: OutputFormat = OutputFormat.CSV
    path: Optional[Path] = None

    @classmethod
    def from_args(cls, fmt: Optional[str], out: Optional[str]) -> "OutputSpec":
        """
        Resolve --format/--out; an .svg or .json suffix picks the format.

        Raises:
            InvalidParameterError: If the format is unknown
        """
        path = Path(out) if out and out != "-" else None
        if fmt is None and path is not None and path.suffix.lower() in (".svg", ".json", ".csv"):
            fmt = path.suffix.lower()[1:]
        try:
            return cls(OutputFormat((fmt or "csv").lower()), path)
        except ValueError as e:
            raise InvalidParameterError(f"Unknown output format: {fmt}") from e

    def require_2d(self, dims: int) -> None:
        if self.format is OutputFormat.SVG and dims != 2:
            raise InvalidParameterError("SVG output needs 2-dimensional points")


def fmt_float(value: float) -> str:
    """Round-trip safe text for a double."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(float(value), ".17g")


@contextmanager
def open_output(spec: OutputSpec) -> Iterator[IO[str]]:
    """
    Text stream for the target, closed afterwards unless it is stdout.

    Missing parent directories are created. Nothing is opened until the
    caller enters the context, so argument errors raised before that leave
    no file behind.

    Args:
        spec: Resolved output target

    Yields:
        A writable text stream with newline translation disabled
    """
    if spec.path is None:
        yield sys.stdout
        sys.stdout.flush()
        return
    spec.path.parent.mkdir(parents=True, exist_ok=True)
    with spec.path.open("w", encoding="utf-8", newline="") as handle:
        yield handle
    logger.info("output_written", path=str(spec.path), format=spec.format.value)


def write_csv(stream: IO[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """
    Write a header and rows with LF line endings.

    Args:
        stream: Destination text stream
        header: Column names
        rows: Row values; floats are written with fmt_float

    Returns:
        Number of data rows written
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    n = 0
    for row in rows:
        writer.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])
        n += 1
    return n


def _json_default(value: Any) -> Any:
    if hasattr(value, "item"):
        return value.item()
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return f"{value.numerator}/{value.denominator}"
    raise TypeError(f"Not JSON serializable: {type(value).__name__}")


def write_json(stream: IO[str], payload: Any) -> None:
    """Indented JSON; numpy scalars become numbers and Fractions "p/q" strings."""
    stream.write(json.dumps(payload, indent=2, default=_json_default))
    stream.write("\n")


def records_to_json(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> List[dict]:
    return [dict(zip(header, row)) for row in rows]


def render_svg(
    points: Sequence[Tuple[float, float]],
    polylines: Sequence[Sequence[Tuple[float, float]]] = (),
    title: str = "",
) -> str:
    """
    Static scatter (1 px dots) plus optional polylines on the square [0, 5]^2.

    Dashed guide lines mark x = 6/pi^2 and y = 6/pi^2. Points outside the
    view are skipped.

    Args:
        points: (x, y) pairs drawn as dots
        polylines: Curves drawn as open polylines; vertices outside the view are dropped
        title: Caption drawn above the plot, XML-escaped

    Returns:
        The SVG document as a string ending in a newline
    """
    lo, hi = SVG_VIEW
    span = SVG_SIZE - 2 * SVG_MARGIN
    scale = span / (hi - lo)

    def to_svg_xy(x: float, y: float) -> Tuple[float, float]:
        return SVG_MARGIN + (x - lo) * scale, SVG_MARGIN + (hi - y) * scale

    def visible(x: float, y: float) -> bool:
        return lo <= x <= hi and lo <= y <= hi

    parts: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect x="0" y="0" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{SVG_SIZE / 2:.1f}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(title)}</text>'
        )

    # axes and the 6/pi^2 guides
    x0, y0 = to_svg_xy(lo, lo)
    x1, y1 = to_svg_xy(hi, hi)
    parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y0:.2f}" stroke="#888"/>')
    parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{y1:.2f}" stroke="#888"/>')
    gx, gy = to_svg_xy(SUPPORT_MIN, SUPPORT_MIN)
    parts.append(
        f'<line x1="{gx:.2f}" y1="{y0:.2f}" x2="{gx:.2f}" y2="{y1:.2f}" '
        f'stroke="#c33" stroke-dasharray="4 4"/>'
    )
    parts.append(
        f'<line x1="{x0:.2f}" y1="{gy:.2f}" x2="{x1:.2f}" y2="{gy:.2f}" '
        f'stroke="#c33" stroke-dasharray="4 4"/>'
    )
    parts.append(
        f'<text x="{gx + 4:.2f}" y="{y0 - 4:.2f}" font-family="sans-serif" font-size="11" '
        f'fill="#c33">6/π²</text>'
    )
    for tick in range(int(lo), int(hi) + 1):
        tx, _ = to_svg_xy(float(tick), lo)
        _, ty = to_svg_xy(lo, float(tick))
        parts.append(f'<text x="{tx:.2f}" y="{y0 + 16:.2f}" font-size="11" text-anchor="middle">{tick}</text>')
        parts.append(f'<text x="{x0 - 8:.2f}" y="{ty + 4:.2f}" font-size="11" text-anchor="end">{tick}</text>')

    parts.append('<g fill="#1f3b73">')
    for x, y in points:
        if visible(x, y):
            cx, cy = to_svg_xy(x, y)
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="1"/>')
    parts.append("</g>")

    if polylines:
        parts.append('<g fill="none" stroke="#d9822b" stroke-width="1">')
        for line in polylines:
            coords = [to_svg_xy(x, y) for x, y in line if visible(x, y)]
            if len(coords) >= 2:
                d = " ".join(f"{x:.2f},{y:.2f}" for x, y in coords)
                parts.append(f'<polyline points="{d}"/>')
        parts.append("</g>")

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV as a string (used by tests and for in-memory checks)."""
    buffer = io.StringIO()
    write_csv(buffer, header, rows)
    return buffer.getvalue()
