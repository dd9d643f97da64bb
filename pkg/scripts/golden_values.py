"""
Monte Carlo golden values for the canonical measure boxes.

Estimates mu_{2,2} of each box in verify.CANONICAL_BOXES by rejection
sampling with a fixed seed and writes value, 3-sigma error bound, sample
count and seed to JSON. The adaptive quadrature is checked against these
numbers, so they are recorded once and regenerated only when the sampler
changes.

Usage:
    python scripts/golden_values.py
    python scripts/golden_values.py --samples 10000000 --seed 1 --out golden.json
"""

import argparse
import sys
import time
from pathlib import Path

import structlog

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from export import OutputFormat, OutputSpec, open_output, write_json  # noqa: E402
from phi_measure import measure_box_mc  # noqa: E402
from settings import configure_logging, get_settings  # noqa: E402
from verify import CANONICAL_BOXES  # noqa: E402

logger = structlog.get_logger(__name__)


def main(samples: int, seed: int, out: str) -> None:
    """Estimate every canonical box and write the records."""
    settings = get_settings()
    configure_logging(settings)

    records = []
    for box in CANONICAL_BOXES:
        start = time.perf_counter()
        result = measure_box_mc(box, samples=samples, seed=seed, settings=settings)
        records.append(
            {
                "box": [list(interval) for interval in box.bounds],
                "value": result.value,
                "error_bound": result.error_bound,
                "samples": samples,
                "seed": seed,
            }
        )
        logger.info(
            "golden_value",
            bounds=box.bounds,
            value=result.value,
            error_bound=result.error_bound,
            seconds=round(time.perf_counter() - start, 2),
        )

    with open_output(OutputSpec(OutputFormat.JSON, Path(out) if out != "-" else None)) as stream:
        write_json(stream, records)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Record Monte Carlo golden values for the canonical boxes",
        epilog="Example: python scripts/golden_values.py --samples 10000000 --out golden.json",
    )
    parser.add_argument(
        "--samples",
        type=int,
        default=10_000_000,
        help="Points drawn per box (default: 10000000)",
    )
    parser.add_argument("--seed", type=int, default=1, help="Sampler seed (default: 1)")
    parser.add_argument("--out", type=str, default="-", help="Output JSON file (default: standard output)")
    args = parser.parse_args()

    main(args.samples, args.seed, args.out)
