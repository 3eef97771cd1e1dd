"""Dependency-free log-log plot of a convergence report.

Output is byte-deterministic: coordinates are printed with fixed precision
and no timestamps or random ids are embedded.  Points are ``<circle>``
elements and the least-squares fit is the only ``<line>`` element.
"""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .verify import ConvergenceReport

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 30, 40, 60


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _decades(lo: float, hi: float) -> list[int]:
    return list(range(math.floor(lo), math.ceil(hi) + 1))


def render_svg(report: ConvergenceReport) -> str:
    if not report.entries:
        raise ValueError("cannot plot an empty report")
    pts = [(math.log10(e.n), math.log10(e.D)) for e in report.entries
           if e.D > 0 and math.isfinite(e.D)]
    if not pts:
        raise ValueError("report has no positive finite discrepancies to plot")
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1 = min(xs) - 0.1, max(xs) + 0.1
    y0, y1 = min(ys) - 0.25, max(ys) + 0.25

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * (WIDTH - LEFT - RIGHT)

    def sy(y):
        return HEIGHT - BOTTOM - (y - y0) / (y1 - y0) * (HEIGHT - TOP - BOTTOM)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    # axes frame
    bx0, bx1 = LEFT, WIDTH - RIGHT
    by0, by1 = TOP, HEIGHT - BOTTOM
    out.append(f'<path d="M{bx0} {by0} L{bx0} {by1} L{bx1} {by1}" fill="none" stroke="black"/>')
    # ticks at decades and intermediate 2x, 5x marks
    for d in _decades(x0, x1):
        for mult in (1, 2, 5):
            v = d + math.log10(mult)
            if x0 <= v <= x1:
                px = _fmt(sx(v))
                out.append(f'<path d="M{px} {by1} L{px} {by1 + 5}" stroke="black"/>')
                out.append(f'<text x="{px}" y="{by1 + 18}" font-size="11" text-anchor="middle">'
                           f'{mult * 10.0 ** d:g}</text>')
    for d in _decades(y0, y1):
        if y0 <= d <= y1:
            py = _fmt(sy(d))
            out.append(f'<path d="M{bx0 - 5} {py} L{bx0} {py}" stroke="black"/>')
            out.append(f'<text x="{bx0 - 8}" y="{py}" font-size="11" text-anchor="end" '
                       f'dominant-baseline="middle">1e{d}</text>')
    out.append(f'<text x="{(bx0 + bx1) / 2:.1f}" y="{HEIGHT - 15}" font-size="13" '
               f'text-anchor="middle">n</text>')
    out.append(f'<text x="18" y="{(by0 + by1) / 2:.1f}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 18 {(by0 + by1) / 2:.1f})">D_n</text>')

    for x, y in pts:
        out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="4" fill="steelblue"/>')

    slope = report.fitted_slope
    if math.isfinite(slope):
        # least-squares line passes through the centroid of the log points
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        fa, fb = min(xs), max(xs)
        out.append(f'<line x1="{_fmt(sx(fa))}" y1="{_fmt(sy(my + slope * (fa - mx)))}" '
                   f'x2="{_fmt(sx(fb))}" y2="{_fmt(sy(my + slope * (fb - mx)))}" '
                   f'stroke="crimson" stroke-width="1.5"/>')
    status = "pass" if report.passed else "fail"
    title = f"{report.law}  slope = {slope:.3f} ({status})"
    out.append(f'<text x="{LEFT}" y="24" font-size="13">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_plot(report: ConvergenceReport, path) -> Path:
    text = render_svg(report)
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path
