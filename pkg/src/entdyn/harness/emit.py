"""CSV and SVG writers for sweep rows. Output is byte-deterministic."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .sweep import SweepRow

CSV_HEADER = "param,c_left,c_right,gamma_left,c_left_tomo"

WIDTH, HEIGHT = 800, 600
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 30, 40, 70
LEFT_COLOR = "#d62728"
RIGHT_COLOR = "#1f77b4"


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.17g}"


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(_fmt(v) for v in (r.param, r.c_left, r.c_right, r.gamma_left, r.c_left_tomo)))
    return "\n".join(lines) + "\n"


def _write(path, text: str, what: str) -> None:
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(text.encode("utf-8"))
    except OSError as exc:
        raise OSError(f"cannot write {what} to {path}: {exc.strerror or exc}") from exc


def emit_csv(rows: Sequence[SweepRow], path) -> None:
    _write(path, rows_to_csv(rows), "CSV")


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    span = hi - lo
    raw = span / max(1, count - 1)
    mag = 10 ** int(f"{raw:e}".split("e")[1])
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = step * int(lo / step)
    ticks = []
    k = 0
    while (t := start + k * step) <= hi + 1e-9 * span:
        if t >= lo - 1e-9 * span:
            ticks.append(round(t, 12))
        k += 1
    return ticks


def rows_to_svg(rows: Sequence[SweepRow], x_label: str = "parameter", title: str = "") -> str:
    if not rows:
        raise ValueError("cannot plot an empty sweep")
    xs = [r.param for r in rows]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = 0.0, 1.0
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        y = min(max(y, y_lo), y_hi)
        return MARGIN_T + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        x = sx(t)
        out.append(f'<line x1="{x:.3f}" y1="{MARGIN_T + ph}" x2="{x:.3f}" y2="{MARGIN_T + ph + 6}" stroke="black"/>')
        out.append(
            f'<text x="{x:.3f}" y="{MARGIN_T + ph + 22}" font-family="sans-serif" font-size="13" '
            f'text-anchor="middle">{t:g}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        y = sy(t)
        out.append(f'<line x1="{MARGIN_L - 6}" y1="{y:.3f}" x2="{MARGIN_L}" y2="{y:.3f}" stroke="black"/>')
        out.append(
            f'<text x="{MARGIN_L - 10}" y="{y + 4:.3f}" font-family="sans-serif" font-size="13" '
            f'text-anchor="end">{t:g}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + pw / 2:.3f}" y="{HEIGHT - 20}" font-family="sans-serif" font-size="15" '
        f'text-anchor="middle">{escape(x_label)}</text>'
    )
    out.append(
        f'<text x="20" y="{MARGIN_T + ph / 2:.3f}" font-family="sans-serif" font-size="15" '
        f'text-anchor="middle" transform="rotate(-90 20 {MARGIN_T + ph / 2:.3f})">concurrence</text>'
    )
    if title:
        out.append(
            f'<text x="{MARGIN_L + pw / 2:.3f}" y="25" font-family="sans-serif" font-size="16" '
            f'text-anchor="middle">{escape(title)}</text>'
        )

    def polyline(values, color, dash):
        pts = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in zip(xs, values))
        extra = ' stroke-dasharray="8,5"' if dash else ""
        return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{extra}/>'

    out.append(polyline([r.c_left for r in rows], LEFT_COLOR, False))
    out.append(polyline([r.c_right for r in rows], RIGHT_COLOR, True))
    tomo = [(r.param, r.c_left_tomo) for r in rows if r.c_left_tomo is not None]
    for x, y in tomo:
        out.append(f'<circle cx="{sx(x):.3f}" cy="{sy(y):.3f}" r="4" fill="{LEFT_COLOR}"/>')

    lx, ly = MARGIN_L + pw - 190, MARGIN_T + 15
    legend = [("C left (evolved state)", LEFT_COLOR, False), ("C right (product bound)", RIGHT_COLOR, True)]
    out.append(f'<rect x="{lx - 10}" y="{ly - 5}" width="195" height="{24 * len(legend) + (24 if tomo else 0) + 6}" '
               'fill="white" stroke="#888888"/>')
    for i, (label, color, dash) in enumerate(legend):
        y = ly + 12 + 24 * i
        extra = ' stroke-dasharray="8,5"' if dash else ""
        out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 30}" y2="{y}" stroke="{color}" stroke-width="2"{extra}/>')
        out.append(f'<text x="{lx + 38}" y="{y + 4}" font-family="sans-serif" font-size="13">{label}</text>')
    if tomo:
        y = ly + 12 + 24 * len(legend)
        out.append(f'<circle cx="{lx + 15}" cy="{y}" r="4" fill="{LEFT_COLOR}"/>')
        out.append(f'<text x="{lx + 38}" y="{y + 4}" font-family="sans-serif" font-size="13">C left (tomography)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(rows: Sequence[SweepRow], path, x_label: str = "parameter", title: str = "") -> None:
    _write(path, rows_to_svg(rows, x_label, title), "SVG")
