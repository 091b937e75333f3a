"""Standalone SVG frequency histograms.

Reproduction artifacts must be viewable with zero dependencies, so the
plots are plain hand-written SVG: bars, a frequency polygon through the
bin centers, axis lines, ticks and labels.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 64
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 52


def _x_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return list(np.linspace(lo, hi, count))


def _y_ticks(top: float) -> list[int]:
    if top <= 5:
        return list(range(0, int(top) + 1))
    step = int(np.ceil(top / 5))
    return list(range(0, int(top) + step, step))


def histogram_svg(edges, counts, title: str, xlabel: str, ylabel: str = "frequency") -> str:
    edges = np.asarray(edges, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if edges.size != counts.size + 1:
        raise ValueError("need len(edges) == len(counts) + 1")
    lo, hi = float(edges[0]), float(edges[-1])
    top = float(counts.max()) if counts.size and counts.max() > 0 else 1.0
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> float:
        return MARGIN_LEFT + (x - lo) / (hi - lo) * plot_w

    def py(c: float) -> float:
        return MARGIN_TOP + plot_h - c / top * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{escape(title)}</text>',
    ]
    for i, c in enumerate(counts):
        x0, x1 = px(edges[i]), px(edges[i + 1])
        y = py(c)
        parts.append(
            f'<rect x="{x0:.2f}" y="{y:.2f}" width="{x1 - x0:.2f}" '
            f'height="{MARGIN_TOP + plot_h - y:.2f}" fill="#9ecae1" stroke="#4292c6" '
            'stroke-width="0.5"/>'
        )
    centers = 0.5 * (edges[:-1] + edges[1:])
    poly = " ".join(f"{px(x):.2f},{py(c):.2f}" for x, c in zip(centers, counts))
    parts.append(f'<polyline points="{poly}" fill="none" stroke="#08306b" stroke-width="1.5"/>')
    # axes
    x_axis_y = MARGIN_TOP + plot_h
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{x_axis_y}" x2="{MARGIN_LEFT + plot_w}" '
        f'y2="{x_axis_y}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{x_axis_y}" stroke="black"/>'
    )
    for tick in _x_ticks(lo, hi):
        x = px(tick)
        parts.append(f'<line x1="{x:.2f}" y1="{x_axis_y}" x2="{x:.2f}" y2="{x_axis_y + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{x:.2f}" y="{x_axis_y + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick:.4g}</text>'
        )
    for tick in _y_ticks(top):
        y = py(tick)
        parts.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{y:.2f}" x2="{MARGIN_LEFT}" y2="{y:.2f}" stroke="black"/>')
        parts.append(
            f'<text x="{MARGIN_LEFT - 9}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick:g}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{escape(xlabel)}</text>'
    )
    parts.append(
        f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.1f})">{escape(ylabel)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_histogram_svg(path, edges, counts, title: str, xlabel: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(histogram_svg(edges, counts, title, xlabel))
