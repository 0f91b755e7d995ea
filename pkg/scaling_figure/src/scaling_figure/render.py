"""Log-log scaling figure: iteration requirement vs. mode radius.

Display layer only.  Every number shown comes verbatim from the sweep's
fit JSON; the records CSV is validated for schema and consistency but no
statistic is recomputed here.  Rendering is a pure function of the input
files: fixed style, pinned PNG metadata, no timestamps, so reruns are
byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

REQUIRED_COLUMNS = (
    "r",
    "M",
    "seed",
    "kl_raw",
    "kl_clamped",
    "mode_coverage",
    "oracle_calls",
    "wall_ms",
)

_SERIES_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728")


class SchemaError(ValueError):
    """An input file is missing a required column or field."""


@dataclass(frozen=True)
class PlotSpec:
    """Input/output paths and the thresholds to draw (None = all)."""

    records_path: Path
    fit_path: Path
    output_path: Path
    thresholds: tuple[float, ...] | None = None


def _load_records(path: Path) -> list[dict]:
    if not path.exists():
        raise FileNotFoundError(f"records file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        columns = reader.fieldnames or []
        for column in REQUIRED_COLUMNS:
            if column not in columns:
                raise SchemaError(f"records file {path} is missing column {column!r}")
        return list(reader)


def _load_fits(path: Path) -> dict:
    if not path.exists():
        raise FileNotFoundError(f"fit file not found: {path}")
    payload = json.loads(path.read_text())
    if "fits" not in payload:
        raise SchemaError(f"fit file {path} is missing field 'fits'")
    for item in payload["fits"]:
        for field in ("threshold", "points"):
            if field not in item:
                raise SchemaError(f"fit entry is missing field {field!r}")
    return payload


def render_scaling_figure(spec: PlotSpec) -> list[str]:
    """Write the figure and return the annotation lines drawn on it."""
    records = _load_records(Path(spec.records_path))
    payload = _load_fits(Path(spec.fit_path))

    record_radii = {float(row["r"]) for row in records}
    entries = payload["fits"]
    if spec.thresholds is not None:
        wanted = set(spec.thresholds)
        entries = [e for e in entries if e["threshold"] in wanted]
    if not entries:
        raise SchemaError("no fit entries selected for drawing")

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    annotations: list[str] = []
    for idx, entry in enumerate(entries):
        color = _SERIES_COLORS[idx % len(_SERIES_COLORS)]
        points = entry["points"]
        radii = [p[0] for p in points]
        budgets = [p[1] for p in points]
        missing = [r for r in radii if r not in record_radii]
        if missing:
            raise SchemaError(
                f"fit points reference radii absent from the records: {missing}"
            )
        label = f"threshold {entry['threshold']}"
        ax.plot(radii, budgets, "o", color=color, markersize=7, label=label)
        if "slope" in entry and "intercept" in entry:
            slope = entry["slope"]
            intercept = entry["intercept"]
            line_r = sorted(radii)
            line_m = [10.0 ** (intercept + slope * math.log10(r)) for r in line_r]
            ax.plot(line_r, line_m, "-", color=color, linewidth=1.5)
            note = f"threshold {entry['threshold']}: slope {slope}, intercept {intercept}"
            if "r_squared" in entry:
                note += f", R^2 {entry['r_squared']}"
            annotations.append(note)

    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("mode radius r")
    ax.set_ylabel("iterations to reach threshold")
    ax.set_title("Iteration requirement vs. mode radius")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="upper left")
    for i, note in enumerate(annotations):
        ax.text(
            0.02,
            0.02 + 0.05 * i,
            note,
            transform=ax.transAxes,
            fontsize=8,
            family="monospace",
        )
    fig.tight_layout()
    fig.savefig(
        spec.output_path,
        dpi=150,
        metadata={"Software": "scaling-figure"},
    )
    plt.close(fig)
    return annotations


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_scaling_figure",
        description="Render the log-log scaling figure from sweep outputs",
    )
    parser.add_argument("--records", required=True, help="records CSV from the sweep")
    parser.add_argument("--fit", required=True, help="fit JSON from the sweep")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--thresholds",
        type=float,
        nargs="*",
        default=None,
        help="subset of thresholds to draw (default: all in the fit file)",
    )
    args = parser.parse_args(argv)
    spec = PlotSpec(
        records_path=Path(args.records),
        fit_path=Path(args.fit),
        output_path=Path(args.out),
        thresholds=tuple(args.thresholds) if args.thresholds else None,
    )
    annotations = render_scaling_figure(spec)
    print(f"wrote {args.out}")
    for note in annotations:
        print(note)
    return 0


if __name__ == "__main__":
    sys.exit(main())
