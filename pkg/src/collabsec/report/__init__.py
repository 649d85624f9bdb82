"""Figures and synthetic data: layout, SVG renderers, network generator."""

from .layout import LayoutPositions, kamada_kawai_layout, stress
from .render import (
    COMPARTMENT_COLORS,
    ColorScale,
    render_histogram_svg,
    render_network_svg,
    render_trends_svg,
)
from .synth import parse_breach_spec, synth_network

__all__ = [
    "COMPARTMENT_COLORS",
    "ColorScale",
    "LayoutPositions",
    "kamada_kawai_layout",
    "parse_breach_spec",
    "render_histogram_svg",
    "render_network_svg",
    "render_trends_svg",
    "stress",
    "synth_network",
]
