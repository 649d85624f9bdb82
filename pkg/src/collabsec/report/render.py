"""Dependency-free SVG renderers with byte-stable output."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping
from xml.sax.saxutils import escape

import numpy as np

from ..network import CollaborationNetwork
from ..seir import DiffusionTrends, VulnerabilityReport
from .layout import LayoutPositions

RGB = tuple[int, int, int]

# susceptible, exposed, infected, removed
COMPARTMENT_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728")
COMPARTMENT_NAMES = ("Susceptible", "Exposed", "Infected", "Removed")


def _hex(rgb: RGB) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _luminance(rgb: RGB) -> float:
    r, g, b = rgb
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


@dataclass(frozen=True)
class ColorScale:
    """Piecewise-linear colormap on [0, 1].

    The default runs pale yellow (0.0) to green (0.5) to garnet (1.0);
    luminance strictly decreases along it, so darker always means more
    often infected.
    """

    stops: tuple[tuple[float, RGB], ...] = (
        (0.0, (255, 255, 204)),
        (0.5, (65, 171, 93)),
        (1.0, (115, 0, 26)),
    )

    def __post_init__(self):
        positions = [p for p, _ in self.stops]
        if positions[0] != 0.0 or positions[-1] != 1.0 or positions != sorted(positions):
            raise ValueError("stops must be sorted and span [0, 1]")
        lum = [_luminance(c) for _, c in self.stops]
        if any(b >= a for a, b in zip(lum, lum[1:])):
            raise ValueError("stop colors must get strictly darker")

    def __call__(self, value: float) -> RGB:
        value = min(1.0, max(0.0, float(value)))
        for (p0, c0), (p1, c1) in zip(self.stops, self.stops[1:]):
            if value <= p1:
                f = (value - p0) / (p1 - p0)
                return tuple(int(round(a + f * (b - a))) for a, b in zip(c0, c1))
        return self.stops[-1][1]

    def hex(self, value: float) -> str:
        return _hex(self(value))


def _n(x: float) -> str:
    return f"{x:.2f}"


def _document(width: int, height: int, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>\n'
    )
    return head + "".join(line + "\n" for line in body) + "</svg>\n"


def _write(path, text: str) -> None:
    Path(path).write_bytes(text.encode("utf-8"))


def network_svg(
    g: CollaborationNetwork,
    positions: LayoutPositions,
    report: VulnerabilityReport,
    scale: ColorScale = ColorScale(),
    size: int = 800,
) -> str:
    if len(positions) != g.n_nodes or len(report.ratio) != g.n_nodes:
        raise ValueError("positions and report must cover every node")
    margin, legend_h = 40, 60
    xy = np.asarray(positions.coordinates, dtype=float).reshape(g.n_nodes, 2)
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    inner = size - 2 * margin
    centre = (lo + hi) / 2.0
    canvas = (xy - centre) / span * inner + size / 2.0

    body = ['<g stroke="#b0b0b0" stroke-width="0.6">']
    for e in g.edges:
        (x1, y1), (x2, y2) = canvas[e.u], canvas[e.v]
        body.append(
            f'<line x1="{_n(x1)}" y1="{_n(y1)}" x2="{_n(x2)}" y2="{_n(y2)}"/>'
        )
    body.append("</g>")
    body.append('<g stroke="#333333" stroke-width="0.5">')
    for node in g.nodes:
        x, y = canvas[node.id]
        ratio = report.ratio[node.id]
        body.append(
            f'<circle cx="{_n(x)}" cy="{_n(y)}" r="6" fill="{scale.hex(ratio)}">'
            f"<title>node {node.id}: {ratio:.2f}</title></circle>"
        )
    body.append("</g>")

    # legend: eleven swatches from 0.0 to 1.0
    top = size + 10
    body.append('<g font-family="sans-serif" font-size="11">')
    body.append(f'<text x="{margin}" y="{top + 10}">Infection ratio</text>')
    for k in range(11):
        v = k / 10
        x = margin + k * 40
        body.append(
            f'<rect x="{x}" y="{top + 16}" width="40" height="14" fill="{scale.hex(v)}"/>'
        )
        body.append(f'<text x="{x}" y="{top + 44}">{v:.1f}</text>')
    body.append("</g>")
    return _document(size, size + legend_h, body)


def render_network_svg(g, positions, report, scale=ColorScale(), path="network.svg") -> None:
    """Nodes at ``positions`` filled by their vulnerability ratio."""
    _write(path, network_svg(g, positions, report, scale))


def _axes(body, left, top, w, h, x_label, y_label, y_max=1.0):
    body.append('<g stroke="#000000" stroke-width="1">')
    body.append(f'<line x1="{left}" y1="{top + h}" x2="{left + w}" y2="{top + h}"/>')
    body.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + h}"/>')
    body.append("</g>")
    body.append('<g font-family="sans-serif" font-size="11" text-anchor="middle">')
    for k in range(6):
        y = top + h - k / 5 * h
        body.append(
            f'<text x="{left - 18}" y="{_n(y + 4)}">{y_max * k / 5:.{0 if y_max > 1 else 1}f}</text>'
        )
    body.append(f'<text x="{left + w / 2:.0f}" y="{top + h + 38}">{escape(x_label)}</text>')
    body.append(
        f'<text x="14" y="{top + h / 2:.0f}" transform="rotate(-90 14 {top + h / 2:.0f})">'
        f"{escape(y_label)}</text>"
    )
    body.append("</g>")


def trends_svg(trends: DiffusionTrends, width: int = 640, height: int = 400) -> str:
    fractions = np.asarray(trends.fractions, dtype=float)
    if fractions.size == 0:
        raise ValueError("trends are empty")
    left, top, right, bottom = 60, 20, 130, 50
    w, h = width - left - right, height - top - bottom
    t_max = max(len(fractions) - 1, 1)
    body: list[str] = []
    _axes(body, left, top, w, h, "Iterations", "Ratio of nodes")
    body.append('<g font-family="sans-serif" font-size="11" text-anchor="middle">')
    for k in range(6):
        t = round(k * t_max / 5)
        body.append(f'<text x="{_n(left + t / t_max * w)}" y="{top + h + 16}">{t}</text>')
    body.append("</g>")
    for c, color in enumerate(COMPARTMENT_COLORS):
        pts = " ".join(
            f"{_n(left + t / t_max * w)},{_n(top + h - v * h)}"
            for t, v in enumerate(fractions[:, c])
        )
        body.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>'
        )
    body.append('<g font-family="sans-serif" font-size="11">')
    for c, (color, name) in enumerate(zip(COMPARTMENT_COLORS, COMPARTMENT_NAMES)):
        y = top + 10 + 18 * c
        body.append(
            f'<line x1="{left + w + 12}" y1="{y}" x2="{left + w + 32}" y2="{y}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        body.append(f'<text x="{left + w + 38}" y="{y + 4}">{name}</text>')
    body.append("</g>")
    return _document(width, height, body)


def render_trends_svg(trends: DiffusionTrends, path) -> None:
    """Mean compartment shares over time: blue S, orange E, green I, red R."""
    _write(path, trends_svg(trends))


def histogram_svg(histogram: Mapping[int, int], width: int = 640, height: int = 400) -> str:
    if not histogram:
        raise ValueError("histogram is empty")
    keys = sorted(histogram)
    left, top, right, bottom = 60, 20, 20, 50
    w, h = width - left - right, height - top - bottom
    peak = 5 * max(1, math.ceil(max(histogram.values()) / 5))
    slot = w / len(keys)
    body: list[str] = []
    _axes(body, left, top, w, h, "Breaches", "Nodes", y_max=peak)
    body.append('<g fill="#1f77b4">')
    for k, key in enumerate(keys):
        bar = histogram[key] / peak * h
        body.append(
            f'<rect x="{_n(left + k * slot + 0.1 * slot)}" y="{_n(top + h - bar)}" '
            f'width="{_n(0.8 * slot)}" height="{_n(bar)}"/>'
        )
    body.append("</g>")
    body.append('<g font-family="sans-serif" font-size="11" text-anchor="middle">')
    for k, key in enumerate(keys):
        body.append(f'<text x="{_n(left + (k + 0.5) * slot)}" y="{top + h + 16}">{key}</text>')
    body.append("</g>")
    return _document(width, height, body)


def render_histogram_svg(histogram: Mapping[int, int], path) -> None:
    """Bar plot of how many nodes have each breach count."""
    _write(path, histogram_svg(histogram))
