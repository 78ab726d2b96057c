"""Minimal, byte-stable SVG line plot for the sigma_L sweep.

Exactly three data elements are emitted: two ``<polyline>`` curves and one
dashed ``<line>`` for the classical bound. Axes, ticks and the frame are a
single ``<path>``.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 760, 480
MARGIN = dict(left=70, right=20, top=40, bottom=60)
COLORS = ("#1f77b4", "#ff7f0e")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def sweep_svg(sigma, s_oracle, s_reduced, *, ylim=(1.0, 2.9), bound=2.0,
              title="CHSH: traditional oracle vs reduced-phase estimator",
              labels=("Traditional CHSH (statevector oracle)",
                      "Reduced-phase estimator S = 2*sqrt(2)*kappa*|gamma|")) -> str:
    sigma = np.asarray(sigma, dtype=float)
    x0, x1 = float(sigma.min()), float(sigma.max())
    if x1 == x0:
        x1 = x0 + 1.0
    y0, y1 = ylim
    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<defs><clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/>'
        "</clipPath></defs>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]

    # frame + ticks in one path
    d = [f"M{left},{top} H{left + pw} V{top + ph} H{left} Z"]
    texts = []
    for xt in np.linspace(x0, x1, 7):
        X = px(xt)
        d.append(f"M{_fmt(X)},{top + ph} v6")
        texts.append(f'<text x="{_fmt(X)}" y="{top + ph + 20}" text-anchor="middle" '
                     f'font-size="12">{xt:.2f}</text>')
    for yt in np.arange(np.ceil(y0 * 4) / 4, y1 + 1e-9, 0.25):
        Y = py(yt)
        d.append(f"M{left},{_fmt(Y)} h-6")
        texts.append(f'<text x="{left - 10}" y="{_fmt(Y + 4)}" text-anchor="end" '
                     f'font-size="12">{yt:.2f}</text>')
    out.append(f'<path d="{" ".join(d)}" fill="none" stroke="black" stroke-width="1"/>')
    out.extend(texts)

    for values, color, name in zip((s_oracle, s_reduced), COLORS, ("oracle", "reduced")):
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(sigma, values))
        out.append(f'<polyline class="{name}" clip-path="url(#plot)" points="{pts}" fill="none" '
                   f'stroke="{color}" stroke-width="2"/>')
    yb = _fmt(py(bound))
    out.append(f'<line class="bound" x1="{left}" y1="{yb}" x2="{left + pw}" y2="{yb}" '
               f'stroke="gray" stroke-width="1" stroke-dasharray="6,4"/>')

    legend_y = top + 18
    for i, (color, label) in enumerate(zip(COLORS + ("gray",), labels + (f"Classical bound S={bound:g}",))):
        y = legend_y + 18 * i
        out.append(f'<rect x="{left + pw - 330}" y="{y - 9}" width="18" height="4" fill="{color}"/>')
        out.append(f'<text x="{left + pw - 305}" y="{y - 3}" font-size="12">{escape(label)}</text>')

    out.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle" '
               f'font-size="14">Phase-lock spread sigma_L (rad)</text>')
    out.append(f'<text x="18" y="{top + ph / 2}" text-anchor="middle" font-size="14" '
               f'transform="rotate(-90 18 {top + ph / 2})">CHSH parameter S</text>')
    out.append(f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
