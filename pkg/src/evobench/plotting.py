"""Minimal static SVG plots of result CSVs.

Output is plain SVG text with coordinates rounded to two decimals, so the
same CSV and spec always give the same bytes.  Each line series is one
``<polyline>``; axes, ticks and legend use ``<line>``, ``<rect>`` and ``<text>``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from .stats import descriptive_summary

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
MISSING = ("", "NA", "nan")


class PlotError(ValueError):
    pass


@dataclass
class PlotSpec:
    kind: str
    x_column: str
    y_columns: list[str]
    log_x: bool = False
    log_y: bool = False
    title: str = ""
    x_label: str = ""
    y_label: str = ""

    def __post_init__(self):
        if self.kind not in ("line", "scatter", "box"):
            raise PlotError(f"unknown plot kind {self.kind!r}")
        if not self.y_columns:
            raise PlotError("at least one y column is required")


def read_csv_columns(path) -> tuple[list[str], list[dict]]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
            header = reader.fieldnames
    except (OSError, csv.Error) as exc:
        raise PlotError(f"cannot read CSV {path}: {exc}") from None
    if not header:
        raise PlotError(f"CSV {path} has no header")
    return list(header), rows


def _number(value: str, column: str, row: int, log: bool):
    if value is None or value.strip() in MISSING:
        return None
    try:
        x = float(value)
    except ValueError:
        raise PlotError(f"row {row}: column {column!r} is not numeric: {value!r}") from None
    if log:
        if x <= 0:
            raise PlotError(f"row {row}: column {column!r} has non-positive value {value!r} on a log axis")
        return math.log10(x)
    return x


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        first, last = math.floor(lo), math.ceil(hi)
        step = max(1, (last - first) // 6 + 1)
        return [float(t) for t in range(first, last + 1, step) if lo - 1e-9 <= t <= hi + 1e-9] or [lo, hi]
    span = hi - lo
    raw = span / 5
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * span:
        out.append(round(t, 12))
        t += step
    return out


def _label(t: float, log: bool) -> str:
    if log:
        return f"1e{int(round(t))}" if abs(t - round(t)) < 1e-9 else f"{10 ** t:.3g}"
    return f"{t:.6g}"


def _pad(lo: float, hi: float) -> tuple[float, float]:
    if hi == lo:
        return lo - 0.5, hi + 0.5
    margin = (hi - lo) * 0.04
    return lo - margin, hi + margin


def render_svg(header: list[str], rows: list[dict], spec: PlotSpec) -> str:
    for col in [spec.x_column, *spec.y_columns]:
        if col not in header:
            raise PlotError(f"column {col!r} not in CSV (have: {', '.join(header)})")

    series = []
    if spec.kind == "box":
        groups: dict[str, list[float]] = {}
        for i, row in enumerate(rows, 1):
            key = row[spec.x_column]
            y = _number(row[spec.y_columns[0]], spec.y_columns[0], i, spec.log_y)
            if y is not None:
                groups.setdefault(key, []).append(y)
        labels = list(groups)
        boxes = [descriptive_summary(groups[k]) for k in labels]
        ys = [v for b in boxes for v in (b.min, b.max)]
        x_lo, x_hi = -0.6, len(labels) - 0.4
    else:
        for col in spec.y_columns:
            pts = []
            for i, row in enumerate(rows, 1):
                x = _number(row[spec.x_column], spec.x_column, i, spec.log_x)
                y = _number(row[col], col, i, spec.log_y)
                if x is not None and y is not None:
                    pts.append((x, y))
            series.append((col, pts))
        xs = [p[0] for _, pts in series for p in pts]
        ys = [p[1] for _, pts in series for p in pts]
        if not xs:
            raise PlotError("no plottable points")
        x_lo, x_hi = _pad(min(xs), max(xs))
    if not ys:
        raise PlotError("no plottable points")
    y_lo, y_hi = _pad(min(ys), max(ys))

    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if spec.title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="15">{escape(spec.title)}</text>')
    # axes
    out.append(f'<line x1="{LEFT}" y1="{TOP + plot_h}" x2="{LEFT + plot_w}" y2="{TOP + plot_h}" stroke="black"/>')
    out.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + plot_h}" stroke="black"/>')
    for t in _ticks(y_lo, y_hi, spec.log_y):
        y = sy(t)
        out.append(f'<line x1="{LEFT - 4}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 6}" y="{y + 4:.2f}" text-anchor="end">{_label(t, spec.log_y)}</text>')
    if spec.kind == "box":
        for i, lab in enumerate(labels):
            x = sx(i)
            out.append(f'<text x="{x:.2f}" y="{TOP + plot_h + 18}" text-anchor="middle">{escape(lab)}</text>')
    else:
        for t in _ticks(x_lo, x_hi, spec.log_x):
            x = sx(t)
            out.append(f'<line x1="{x:.2f}" y1="{TOP + plot_h}" x2="{x:.2f}" y2="{TOP + plot_h + 4}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{TOP + plot_h + 18}" text-anchor="middle">{_label(t, spec.log_x)}</text>')
    x_label = spec.x_label or spec.x_column
    y_label = spec.y_label or (spec.y_columns[0] if len(spec.y_columns) == 1 else "")
    out.append(f'<text x="{LEFT + plot_w / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_label)}</text>')
    if y_label:
        out.append(
            f'<text x="16" y="{TOP + plot_h / 2:.2f}" text-anchor="middle" '
            f'transform="rotate(-90 16 {TOP + plot_h / 2:.2f})">{escape(y_label)}</text>'
        )

    if spec.kind == "box":
        half = plot_w / max(len(labels), 1) * 0.3
        color = PALETTE[0]
        for i, b in enumerate(boxes):
            x = sx(i)
            out.append(f'<line x1="{x:.2f}" y1="{sy(b.min):.2f}" x2="{x:.2f}" y2="{sy(b.max):.2f}" stroke="{color}"/>')
            top, bottom = sy(b.q3), sy(b.q1)
            out.append(
                f'<rect x="{x - half:.2f}" y="{top:.2f}" width="{2 * half:.2f}" '
                f'height="{bottom - top:.2f}" fill="white" stroke="{color}"/>'
            )
            out.append(
                f'<line x1="{x - half:.2f}" y1="{sy(b.median):.2f}" x2="{x + half:.2f}" '
                f'y2="{sy(b.median):.2f}" stroke="{color}" stroke-width="2"/>'
            )
    else:
        for k, (col, pts) in enumerate(series):
            color = PALETTE[k % len(PALETTE)]
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            if spec.kind == "line":
                out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            else:
                for x, y in pts:
                    out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" fill="{color}"/>')
            ly = TOP + 14 + 18 * k
            lx = LEFT + plot_w + 12
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{lx + 24}" y="{ly}">{escape(col)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(csv_path, spec: PlotSpec, out_path) -> None:
    header, rows = read_csv_columns(csv_path)
    svg = render_svg(header, rows, spec)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg)
