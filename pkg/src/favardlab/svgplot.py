"""Dependency-free log-log SVG chart of a decay curve with error bars."""

from __future__ import annotations

import json
import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 480
MARGIN = {"left": 70, "right": 20, "top": 40, "bottom": 55}


def _c(v: float) -> str:
    return f"{v:.2f}"


class LogAxis:
    """Affine map from ``log10(value)`` onto a pixel range."""

    def __init__(self, vmin, vmax, pmin, pmax):
        lo, hi = math.log10(vmin), math.log10(vmax)
        if hi - lo < 1e-9:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        self.lo, self.hi = lo - pad, hi + pad
        self.pmin, self.pmax = pmin, pmax

    def __call__(self, v):
        t = (math.log10(v) - self.lo) / (self.hi - self.lo)
        return self.pmin + t * (self.pmax - self.pmin)

    @property
    def pixels_per_decade(self) -> float:
        return (self.pmax - self.pmin) / (self.hi - self.lo)

    def ticks(self):
        out = []
        for e in range(math.floor(self.lo), math.ceil(self.hi) + 1):
            for m in (1, 2, 5):
                v = m * 10.0**e
                if self.lo <= math.log10(v) <= self.hi:
                    out.append(v)
        return out


def _tick_label(v: float) -> str:
    return f"{v:g}"


def decay_plot_svg(ks, means, stderrs, *, title="Expected projection length", metadata=None) -> str:
    """SVG with data (points, error bars, polyline) and the fitted ``C/k`` line.

    ``metadata`` is embedded as JSON in a ``<metadata>`` element.
    """
    ks = np.asarray(ks, dtype=float)
    means = np.asarray(means, dtype=float)
    stderrs = np.asarray(stderrs, dtype=float)
    if len(ks) == 0:
        raise ValueError("nothing to plot")
    if np.any(ks <= 0) or np.any(means <= 0):
        raise ValueError("log-log plot needs positive levels and means")
    C = math.exp(float(np.mean(np.log(means) + np.log(ks))))
    fit = C / ks

    lows = np.where(means - stderrs > 0, means - stderrs, means)
    highs = means + stderrs
    x_axis = LogAxis(ks.min(), ks.max(), MARGIN["left"], WIDTH - MARGIN["right"])
    y_axis = LogAxis(
        min(lows.min(), fit.min()), max(highs.max(), fit.max()), HEIGHT - MARGIN["bottom"], MARGIN["top"]
    )
    left, right = MARGIN["left"], WIDTH - MARGIN["right"]
    top, bottom = MARGIN["top"], HEIGHT - MARGIN["bottom"]

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
    ]
    if metadata is not None:
        out.append(f"<metadata>{escape(json.dumps(metadata, sort_keys=True))}</metadata>")
    out += [
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        '<g class="axes" stroke="black" stroke-width="1">',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}"/>',
        "</g>",
        '<g class="ticks" font-size="11">',
    ]
    for v in x_axis.ticks():
        px = x_axis(v)
        out.append(f'<line x1="{_c(px)}" y1="{bottom}" x2="{_c(px)}" y2="{bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{_c(px)}" y="{bottom + 18}" text-anchor="middle">{_tick_label(v)}</text>')
    for v in y_axis.ticks():
        py = y_axis(v)
        out.append(f'<line x1="{left - 5}" y1="{_c(py)}" x2="{left}" y2="{_c(py)}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{_c(py + 4)}" text-anchor="end">{_tick_label(v)}</text>')
    out.append("</g>")
    out.append(f'<text x="{(left + right) / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">level k</text>')
    out.append(
        f'<text x="18" y="{(top + bottom) / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {(top + bottom) / 2:.2f})">mean projection length</text>'
    )

    out.append('<g class="errorbars" stroke="#1f77b4" stroke-width="1">')
    for k, lo, hi in zip(ks, lows, highs):
        px = _c(x_axis(k))
        out.append(f'<line x1="{px}" y1="{_c(y_axis(lo))}" x2="{px}" y2="{_c(y_axis(hi))}"/>')
    out.append("</g>")

    data_pts = " ".join(f"{_c(x_axis(k))},{_c(y_axis(m))}" for k, m in zip(ks, means))
    fit_pts = " ".join(f"{_c(x_axis(k))},{_c(y_axis(f))}" for k, f in zip(ks, fit))
    out.append(f'<polyline class="series data" fill="none" stroke="#1f77b4" stroke-width="1.5" points="{data_pts}"/>')
    out.append(
        f'<polyline class="series fit" fill="none" stroke="#d62728" stroke-width="1.5" '
        f'stroke-dasharray="6 4" points="{fit_pts}"/>'
    )
    out.append('<g class="markers" fill="#1f77b4">')
    for k, m in zip(ks, means):
        out.append(f'<circle cx="{_c(x_axis(k))}" cy="{_c(y_axis(m))}" r="3"/>')
    out.append("</g>")

    lx, ly = right - 170, top + 10
    out += [
        '<g class="legend">',
        f'<rect x="{lx}" y="{ly}" width="160" height="44" fill="white" stroke="#999"/>',
        f'<line x1="{lx + 8}" y1="{ly + 14}" x2="{lx + 36}" y2="{ly + 14}" stroke="#1f77b4" stroke-width="1.5"/>',
        f'<text x="{lx + 42}" y="{ly + 18}">mean ± stderr</text>',
        f'<line x1="{lx + 8}" y1="{ly + 32}" x2="{lx + 36}" y2="{ly + 32}" stroke="#d62728" '
        'stroke-width="1.5" stroke-dasharray="6 4"/>',
        f'<text x="{lx + 42}" y="{ly + 36}">fit C/k, C = {C:.4g}</text>',
        "</g>",
        "</svg>",
    ]
    return "\n".join(out) + "\n"
