"""SVG plot of a radial profile against the identity line."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .minimizer import RadialMinimizer

WIDTH, HEIGHT, MARGIN = 480, 360, 48
N_SAMPLES = 400


def max_identity_deviation(m: RadialMinimizer, n: int = 2001) -> float:
    """``max_t |H(t) - t|`` on a uniform grid of ``[1, r]``."""
    t = np.linspace(1.0, m.r, n)
    return float(np.max(np.abs(m.H_exact(t) - t)))


def _polyline(xs, ys, sx, sy, **attrs) -> str:
    pts = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in zip(xs, ys))
    extra = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'  <polyline fill="none" {extra} points="{pts}"/>'


def profile_svg(m: RadialMinimizer) -> str:
    """SVG text; the ``<metadata>`` element carries the parameters and the deviation."""
    t = np.linspace(1.0, m.r, N_SAMPLES)
    H = m.H_exact(t)
    dev = max_identity_deviation(m)
    y_lo, y_hi = 1.0, max(m.R, m.r)
    x_lo, x_hi = 1.0, m.r

    def sx(x):
        return MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def sy(y):
        return HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    title = f"H(t), r={m.r:g}, R={m.R:g}, p={m.p:g}"
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        "  <metadata>",
        f'    <profile r="{m.r:.17g}" R="{m.R:.17g}" p="{m.p:.17g}" regime="{m.regime}" '
        f'max_deviation="{dev:.17g}" far_from_identity="{str(dev > 0.05).lower()}"/>',
        "  </metadata>",
        f"  <title>{escape(title)}</title>",
        f'  <rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
        f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="#888"/>',
        _polyline([x_lo, x_hi], [x_lo, min(x_hi, y_hi)], sx, sy, stroke="#999", stroke_dasharray="4 3"),
        _polyline(t, H, sx, sy, stroke="#c0392b", stroke_width="2"),
        f'  <text x="{MARGIN}" y="{MARGIN - 12}" font-size="13" font-family="sans-serif">'
        f"{escape(title)}; max |H - t| = {dev:.4g}</text>",
        f'  <text x="{MARGIN}" y="{HEIGHT - MARGIN + 18}" font-size="11" font-family="sans-serif">1</text>',
        f'  <text x="{WIDTH - MARGIN - 8}" y="{HEIGHT - MARGIN + 18}" font-size="11" '
        f'font-family="sans-serif">{m.r:g}</text>',
        "</svg>",
    ]
    return "\n".join(lines) + "\n"


def write_profile_svg(m: RadialMinimizer, path: str | Path) -> float:
    """Write the plot and return the recorded deviation."""
    Path(path).write_text(profile_svg(m))
    return max_identity_deviation(m)
