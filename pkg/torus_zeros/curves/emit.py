"""
Curve files: CSV point lists and static SVG plots.

Output is bit-stable: points in traced order, reals in CSV with 17
significant digits, SVG drawn with matplotlib under a fixed
hash salt and without a date stamp.
"""

import csv
import hashlib
import logging
from pathlib import Path

import matplotlib as mpl
from matplotlib.figure import Figure
from matplotlib.lines import Line2D

from torus_zeros.exceptions.validation import InvalidFormatException
from torus_zeros.models.curves import CurvePolyline
from torus_zeros.models.enums import DegeneracyCurveId, OutputFormat
from torus_zeros.models.moduli import Rectangle

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("curve_id", "re", "im", "residual", "grad_norm")

_WIDTH_IN = 8.0
_SVG_RC = {"svg.hashsalt": "torus-zeros", "svg.fonttype": "none", "path.simplify": False}


def region_hash(region: Rectangle) -> str:
    return hashlib.sha256(str(region).encode("utf-8")).hexdigest()[:10]


def curve_filename(name: str, region: Rectangle, fmt: OutputFormat) -> str:
    """<curve_id>_<region-hash>.<ext>"""
    return f"{name}_{region_hash(region)}.{fmt.value}"


def _real(value: float) -> str:
    return format(float(value), ".17g")


def write_csv(polylines: list[CurvePolyline], path: Path) -> Path:
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for line in polylines:
            for point, residual, grad_norm in zip(line.points, line.residuals, line.grad_norms):
                w.writerow([line.curve_id.value, _real(point.re), _real(point.im), _real(residual), _real(grad_norm)])
    return path


def read_csv(path: Path) -> list[dict]:
    """Rows of a curve CSV with the numeric columns parsed back to floats."""
    with path.open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    return [{"curve_id": r["curve_id"], **{c: float(r[c]) for c in CSV_COLUMNS[1:]}} for r in rows]


def _xy(line: CurvePolyline) -> tuple[list[float], list[float]]:
    points = line.points + line.points[:1] if line.closed else line.points
    return [p.re for p in points], [p.im for p in points]


def write_svg(polylines: list[CurvePolyline], region: Rectangle, path: Path) -> Path:
    """
    One line per polyline, colored by curve id, on the region's axes.

    Each polyline is drawn inside a group with id polyline-<n>-<curve_id>.
    """
    with mpl.rc_context(_SVG_RC):
        fig = Figure(figsize=(_WIDTH_IN, _WIDTH_IN * region.height / region.width))
        ax = fig.add_subplot()
        ax.set_xlim(region.re_min, region.re_max)
        ax.set_ylim(region.im_min, region.im_max)
        ax.set_aspect("equal")
        ax.set_xlabel("Re tau")
        ax.set_ylabel("Im tau")
        if region.re_min < 0 < region.re_max:
            ax.axvline(0.0, color="#888888", linestyle="--", linewidth=0.8)

        for n, line in enumerate(polylines):
            if not line.points:
                continue
            re, im = _xy(line)
            ax.plot(re, im, color=line.curve_id.color, linewidth=1.5, gid=f"polyline-{n}-{line.curve_id.value}")

        present = sorted({line.curve_id for line in polylines}, key=lambda c: list(DegeneracyCurveId).index(c))
        if present:
            handles = [Line2D([], [], color=c.color, label=c.value) for c in present]
            ax.legend(handles=handles, loc="upper right", fontsize="small")

        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def emit(
    name: str,
    polylines: list[CurvePolyline],
    fmt: OutputFormat | str,
    region: Rectangle,
    output_dir: Path,
) -> Path:
    """
    Write polylines to <output_dir>/<name>_<region-hash>.<csv|svg>.

    name is a curve id, or "all" for the combined five-curve plot.
    """
    fmt = OutputFormat(fmt)
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / curve_filename(name, region, fmt)

    if fmt is OutputFormat.CSV:
        write_csv(polylines, path)
    elif fmt is OutputFormat.SVG:
        write_svg(polylines, region, path)
    else:
        raise InvalidFormatException(field="format", expected_format="csv or svg", provided_value=fmt.value)

    logger.info(f"wrote {sum(len(p) for p in polylines)} points in {len(polylines)} polylines to {path}")
    return path
