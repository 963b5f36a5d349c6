"""Static SVG line charts of the co-movement series.

Output is a pure function of the data (no timestamps, fixed float
formatting), so re-rendering identical inputs gives identical bytes.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from comove.correlation import ComovementSeries

__all__ = ["PANELS", "render_comovements"]

PANELS = (
    ("Co-movement 1: funding liquidity, interbank vs exchange", ("rho_1a", "rho_1b")),
    ("Co-movement 2: funding vs market liquidity", ("rho_2a", "rho_2b", "rho_2c", "rho_2d")),
)

LABELS = {
    "rho_1a": "1a CL-ER",
    "rho_1b": "1b IR-ER",
    "rho_2a": "2a CL-PFB",
    "rho_2b": "2b CL-CP",
    "rho_2c": "2c IR-PFB",
    "rho_2d": "2d IR-CP",
}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")

WIDTH, PANEL_H = 820, 300
LEFT, RIGHT, TOP, BOTTOM = 60, 150, 36, 40


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _panel(series: ComovementSeries, title: str, names, y0: float) -> list[str]:
    n = len(series)
    pw = WIDTH - LEFT - RIGHT
    ph = PANEL_H - TOP - BOTTOM
    x_of = (lambda i: LEFT + pw * i / (n - 1)) if n > 1 else (lambda i: LEFT + pw / 2)

    def y_of(v):
        return y0 + TOP + ph * (1.0 - float(np.clip(v, 0.0, 1.0)))

    out = [f'<text x="{LEFT}" y="{_fmt(y0 + 22)}" font-size="14" font-weight="bold">{escape(title)}</text>']
    out.append(
        f'<rect x="{LEFT}" y="{_fmt(y0 + TOP)}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#444" stroke-width="1"/>'
    )
    for tick in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        y = y_of(tick)
        out.append(f'<line x1="{LEFT}" y1="{_fmt(y)}" x2="{LEFT + pw}" y2="{_fmt(y)}" stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_fmt(y + 4)}" font-size="11" text-anchor="end">{tick:.1f}</text>')
    years = sorted({d.year for d in series.week_end})
    for year in years:
        idx = next(i for i, d in enumerate(series.week_end) if d.year == year)
        x = x_of(idx)
        out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(y0 + TOP + ph)}" x2="{_fmt(x)}" y2="{_fmt(y0 + TOP + ph + 5)}" stroke="#444"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(y0 + TOP + ph + 18)}" font-size="11" text-anchor="middle">{year}</text>')
    for k, name in enumerate(names):
        values = series[name]
        pts = " ".join(f"{_fmt(x_of(i))},{_fmt(y_of(v))}" for i, v in enumerate(values))
        color = COLORS[k % len(COLORS)]
        out.append(f'<polyline id="{name}" fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = y0 + TOP + 14 + 18 * k
        lx = LEFT + pw + 14
        out.append(f'<line x1="{lx}" y1="{_fmt(ly - 4)}" x2="{lx + 20}" y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{_fmt(ly)}" font-size="11">{escape(LABELS[name])}</text>')
    return out


def render_comovements(series: ComovementSeries, path: str | Path | None = None) -> str:
    """Two stacked charts (1a/1b and 2a-2d); values outside [0, 1] are clipped for display."""
    height = PANEL_H * len(PANELS)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{height}" fill="white"/>',
    ]
    for k, (title, names) in enumerate(PANELS):
        parts.append(f'<g id="comovement{k + 1}">')
        parts.extend(_panel(series, title, names, k * PANEL_H))
        parts.append("</g>")
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
