"""Minimal deterministic SVG line plots.

Hand-rolled on purpose: the artifact's plots are consumed by tests and static
reports, so byte-identical output for identical data matters more than styling.
Every coordinate is formatted with a fixed precision and no timestamps or
random identifiers are emitted.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 34, 44

PALETTE = ("#1b6ca8", "#c23b22", "#2e8540", "#7d3c98", "#b7770d", "#444444")


def _fmt(x):
    return f"{x:.3f}"


def _ticks(lo, hi, count=5):
    if not math.isfinite(lo) or not math.isfinite(hi):
        lo, hi = 0.0, 1.0
    if hi - lo < 1e-300:
        pad = max(1e-6, abs(lo) * 1e-3, 1e-3)
        lo, hi = lo - pad, hi + pad
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _esc(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def line_plot(path, title, xlabel, ylabel, series, logy=False, dashed=()):
    """Write one SVG line plot.

    ``series`` is a list of (label, xs, ys); labels in ``dashed`` are drawn
    with a dash pattern (reference curves).  With ``logy`` the y data are
    plotted as log10 and nonpositive values are dropped.
    """
    clean = []
    for label, xs, ys in series:
        pts = []
        for x, y in zip(xs, ys):
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if logy:
                if y <= 0.0:
                    continue
                y = math.log10(y)
            pts.append((float(x), float(y)))
        clean.append((label, pts))
    all_pts = [p for _, pts in clean for p in pts]
    if not all_pts:
        raise ValueError("nothing to plot")
    xlo = min(p[0] for p in all_pts)
    xhi = max(p[0] for p in all_pts)
    ylo = min(p[1] for p in all_pts)
    yhi = max(p[1] for p in all_pts)
    if xhi - xlo < 1e-300:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi - ylo < 1e-300:
        pad = max(1e-6, abs(ylo) * 1e-3, 1e-3)
        ylo, yhi = ylo - pad, yhi + pad
    ypad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - ypad, yhi + ypad

    px0, px1 = MARGIN_L, WIDTH - MARGIN_R
    py0, py1 = HEIGHT - MARGIN_B, MARGIN_T

    def sx(x):
        return px0 + (x - xlo) / (xhi - xlo) * (px1 - px0)

    def sy(y):
        return py0 + (y - ylo) / (yhi - ylo) * (py1 - py0)

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
               f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">')
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>')
    out.append(f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" '
               f'font-family="monospace" font-size="14">{_esc(title)}</text>')
    out.append(f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" '
               f'height="{py0 - py1}" fill="none" stroke="#000000"/>')

    for tx in _ticks(xlo, xhi):
        X = sx(tx)
        out.append(f'<line x1="{_fmt(X)}" y1="{py0}" x2="{_fmt(X)}" '
                   f'y2="{py0 + 4}" stroke="#000000"/>')
        out.append(f'<text x="{_fmt(X)}" y="{py0 + 18}" text-anchor="middle" '
                   f'font-family="monospace" font-size="10">{tx:.3g}</text>')
    for ty in _ticks(ylo, yhi):
        Y = sy(ty)
        label = f"{ty:.3g}"
        out.append(f'<line x1="{px0 - 4}" y1="{_fmt(Y)}" x2="{px0}" '
                   f'y2="{_fmt(Y)}" stroke="#000000"/>')
        out.append(f'<text x="{px0 - 7}" y="{_fmt(Y + 3)}" text-anchor="end" '
                   f'font-family="monospace" font-size="10">{label}</text>')
    out.append(f'<text x="{(px0 + px1) // 2}" y="{HEIGHT - 8}" text-anchor="middle" '
               f'font-family="monospace" font-size="12">{_esc(xlabel)}</text>')
    ylab = f"log10({ylabel})" if logy else ylabel
    out.append(f'<text x="16" y="{(py0 + py1) // 2}" text-anchor="middle" '
               f'font-family="monospace" font-size="12" '
               f'transform="rotate(-90 16 {(py0 + py1) // 2})">{_esc(ylab)}</text>')

    for i, (label, pts) in enumerate(clean):
        if not pts:
            continue
        color = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6 4"' if label in dashed else ""
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"'
                   f'{dash} points="{coords}"/>')
        ly = MARGIN_T + 14 + 14 * i
        out.append(f'<line x1="{px1 - 150}" y1="{ly - 4}" x2="{px1 - 126}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{px1 - 120}" y="{ly}" font-family="monospace" '
                   f'font-size="11">{_esc(label)}</text>')

    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
