"""Standalone SVG plots: line series, scatter overlays and region rasters.

No plotting dependency; the output is plain SVG 1.1 text, which keeps
figures diff-able in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import DomainError

WIDTH, HEIGHT = 720.0, 480.0
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 72.0, 24.0, 40.0, 52.0

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
REGION_FILLS = {1: "#c6dbef", 2: "#c7e9c0", 3: "#fdd0a2"}


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    color: str | None = None
    dashed: bool = False
    scatter: bool = False

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise DomainError("series x and y must be equal-length vectors")


def _nice_ticks(lo: float, hi: float, target: int = 6):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0]
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1.0, 2.0, 5.0, 10.0) if raw <= m * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-9 * (hi - lo):
        ticks.append(0.0 if abs(value) < 1e-9 * step else value)
        value += step
    return ticks


def _finite_range(values):
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return 0.0, 1.0
    lo, hi = float(np.min(finite)), float(np.max(finite))
    if hi == lo:
        pad = 1.0 if lo == 0.0 else abs(lo) * 0.1
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


class _Canvas:
    def __init__(self, title, xlabel, ylabel, xlim, ylim, provenance=None):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{WIDTH:.0f}" height="{HEIGHT:.0f}" '
            f'viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">',
        ]
        if provenance:
            for key in sorted(provenance):
                self.parts.append(f"<!-- {escape(str(key))} = {escape(str(provenance[key]))} -->")
        self.parts.append(f'<rect width="{WIDTH:.0f}" height="{HEIGHT:.0f}" fill="#ffffff"/>')
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel

    def px(self, x):
        frac = (x - self.x0) / (self.x1 - self.x0)
        return MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R)

    def py(self, y):
        frac = (y - self.y0) / (self.y1 - self.y0)
        return HEIGHT - MARGIN_B - frac * (HEIGHT - MARGIN_T - MARGIN_B)

    def axes(self):
        left, right = MARGIN_L, WIDTH - MARGIN_R
        top, bottom = MARGIN_T, HEIGHT - MARGIN_B
        self.parts.append(
            f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
            'fill="none" stroke="#222222" stroke-width="1"/>')
        for tick in _nice_ticks(self.x0, self.x1):
            px = self.px(tick)
            if not left - 0.5 <= px <= right + 0.5:
                continue
            self.parts.append(f'<line x1="{px:.2f}" y1="{bottom}" x2="{px:.2f}" '
                              f'y2="{bottom + 5}" stroke="#222222"/>')
            self.parts.append(f'<text x="{px:.2f}" y="{bottom + 18}" font-size="11" '
                              f'text-anchor="middle" font-family="sans-serif">{tick:g}</text>')
        for tick in _nice_ticks(self.y0, self.y1):
            py = self.py(tick)
            if not top - 0.5 <= py <= bottom + 0.5:
                continue
            self.parts.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" '
                              f'y2="{py:.2f}" stroke="#222222"/>')
            self.parts.append(f'<text x="{left - 8}" y="{py + 4:.2f}" font-size="11" '
                              f'text-anchor="end" font-family="sans-serif">{tick:g}</text>')
        if self.title:
            self.parts.append(f'<text x="{WIDTH / 2:.0f}" y="{MARGIN_T - 14}" font-size="14" '
                              f'text-anchor="middle" font-family="sans-serif">'
                              f'{escape(self.title)}</text>')
        if self.xlabel:
            self.parts.append(f'<text x="{(left + right) / 2:.0f}" y="{HEIGHT - 14}" '
                              f'font-size="12" text-anchor="middle" font-family="sans-serif">'
                              f'{escape(self.xlabel)}</text>')
        if self.ylabel:
            cx, cy = 18, (top + bottom) / 2
            self.parts.append(f'<text x="{cx}" y="{cy:.0f}" font-size="12" '
                              f'text-anchor="middle" font-family="sans-serif" '
                              f'transform="rotate(-90 {cx} {cy:.0f})">{escape(self.ylabel)}</text>')

    def legend(self, entries):
        if not entries:
            return
        x = WIDTH - MARGIN_R - 170
        y = MARGIN_T + 14
        box_h = 18 * len(entries) + 8
        self.parts.append(f'<rect x="{x - 8}" y="{y - 14}" width="176" height="{box_h}" '
                          'fill="#ffffff" fill-opacity="0.85" stroke="#999999"/>')
        for label, color, dashed, scatter in entries:
            if scatter:
                self.parts.append(f'<circle cx="{x + 12}" cy="{y - 3}" r="3.5" fill="{color}"/>')
            else:
                dash = ' stroke-dasharray="6,4"' if dashed else ""
                self.parts.append(f'<line x1="{x}" y1="{y - 3}" x2="{x + 24}" y2="{y - 3}" '
                                  f'stroke="{color}" stroke-width="2"{dash}/>')
            self.parts.append(f'<text x="{x + 30}" y="{y}" font-size="11" '
                              f'font-family="sans-serif">{escape(label)}</text>')
            y += 18
        return

    def finish(self, path):
        self.parts.append("</svg>")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.parts) + "\n")


def plot_series(series_list, path, title="", xlabel="", ylabel="", provenance=None):
    """Render line/scatter series with axes, tick labels and a legend."""
    if not series_list:
        raise DomainError("need at least one series to plot")
    xlim = _finite_range(np.concatenate([s.x for s in series_list]))
    ylim = _finite_range(np.concatenate([s.y for s in series_list]))
    canvas = _Canvas(title, xlabel, ylabel, xlim, ylim, provenance)
    canvas.axes()
    entries = []
    for i, s in enumerate(series_list):
        color = s.color or PALETTE[i % len(PALETTE)]
        if s.scatter:
            for x, y in zip(s.x, s.y):
                if math.isfinite(x) and math.isfinite(y):
                    canvas.parts.append(f'<circle cx="{canvas.px(x):.2f}" '
                                        f'cy="{canvas.py(y):.2f}" r="3.5" fill="{color}"/>')
        else:
            # Break polylines at NaN gaps (used for branch non-existence).
            finite = np.isfinite(s.x) & np.isfinite(s.y)
            start = 0
            for stop in list(np.flatnonzero(~finite)) + [len(finite)]:
                if stop - start >= 2:
                    pts = " ".join(f"{canvas.px(x):.2f},{canvas.py(y):.2f}"
                                   for x, y in zip(s.x[start:stop], s.y[start:stop]))
                    dash = ' stroke-dasharray="6,4"' if s.dashed else ""
                    canvas.parts.append(f'<polyline points="{pts}" fill="none" '
                                        f'stroke="{color}" stroke-width="1.8"{dash}/>')
                start = stop + 1
        if s.label:
            entries.append((s.label, color, s.dashed, s.scatter))
    canvas.legend(entries)
    canvas.finish(path)


def plot_region_map(x_values, y_values, codes, path, title="", xlabel="", ylabel="",
                    labels=None, provenance=None):
    """Filled-cell raster of integer region codes on a rectangular grid.

    codes has shape (len(x_values), len(y_values)); each code gets one fill
    color and a legend entry.
    """
    x_values = np.asarray(x_values, float)
    y_values = np.asarray(y_values, float)
    codes = np.asarray(codes)
    if codes.shape != (x_values.size, y_values.size):
        raise DomainError("region codes must have shape (n_x, n_y)")
    dx = (x_values[-1] - x_values[0]) / max(1, x_values.size - 1)
    dy = (y_values[-1] - y_values[0]) / max(1, y_values.size - 1)
    xlim = (x_values[0] - dx / 2, x_values[-1] + dx / 2)
    ylim = (y_values[0] - dy / 2, y_values[-1] + dy / 2)
    canvas = _Canvas(title, xlabel, ylabel, xlim, ylim, provenance)
    for i, x in enumerate(x_values):
        for j, y in enumerate(y_values):
            fill = REGION_FILLS.get(int(codes[i, j]), "#eeeeee")
            px0 = canvas.px(x - dx / 2)
            py0 = canvas.py(y + dy / 2)
            w = canvas.px(x + dx / 2) - px0
            h = canvas.py(y - dy / 2) - py0
            canvas.parts.append(f'<rect x="{px0:.2f}" y="{py0:.2f}" width="{w:.2f}" '
                                f'height="{h:.2f}" fill="{fill}"/>')
    canvas.axes()
    names = labels or {code: f"region {code}" for code in sorted(REGION_FILLS)}
    x = WIDTH - MARGIN_R - 150
    y = MARGIN_T + 14
    canvas.parts.append(f'<rect x="{x - 8}" y="{y - 14}" width="156" '
                        f'height="{18 * len(names) + 8}" fill="#ffffff" '
                        'fill-opacity="0.85" stroke="#999999"/>')
    for code in sorted(names):
        fill = REGION_FILLS.get(int(code), "#eeeeee")
        canvas.parts.append(f'<rect x="{x}" y="{y - 11}" width="14" height="11" '
                            f'fill="{fill}" stroke="#666666"/>')
        canvas.parts.append(f'<text x="{x + 20}" y="{y}" font-size="11" '
                            f'font-family="sans-serif">{escape(str(names[code]))}</text>')
        y += 18
    canvas.finish(path)
