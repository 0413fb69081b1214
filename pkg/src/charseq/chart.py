"""Hand-written SVG chart of a decay table: gap per k, and chord upper bound on a log axis."""

from __future__ import annotations

import math

from charseq.errors import DomainError
from charseq.oracle import DecayTable

WIDTH, HEIGHT = 640, 480
MARGIN = 50
PANEL_GAP = 40
LOG_FLOOR = -16


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _panel(x0, y0, w, h, ks, values, title, ylabel_lo, ylabel_hi, color):
    lo, hi = min(values), max(values)
    span = hi - lo or 1.0
    kmin, kmax = ks[0], ks[-1]
    kspan = (kmax - kmin) or 1
    pts = [
        (x0 + (k - kmin) / kspan * w, y0 + h - (v - lo) / span * h)
        for k, v in zip(ks, values)
    ]
    out = [
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" height="{_fmt(h)}" fill="none" stroke="#999"/>',
        f'<text x="{_fmt(x0)}" y="{_fmt(y0 - 6)}" font-size="12">{title}</text>',
        f'<text x="{_fmt(x0 - 4)}" y="{_fmt(y0 + h)}" font-size="10" text-anchor="end">{ylabel_lo}</text>',
        f'<text x="{_fmt(x0 - 4)}" y="{_fmt(y0 + 10)}" font-size="10" text-anchor="end">{ylabel_hi}</text>',
        '<polyline fill="none" stroke="{}" points="{}"/>'.format(
            color, " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        ),
    ]
    out += [f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2" fill="{color}"/>' for x, y in pts]
    return out


def render_svg(table: DecayTable) -> str:
    if not table.rows:
        raise DomainError("cannot chart an empty decay table")
    ks = [r.k for r in table.rows]
    gaps = [float(r.gap) for r in table.rows]
    logs = [math.log10(float(r.chord_hi)) if r.chord_hi > 0 else LOG_FLOOR for r in table.rows]
    logs = [max(v, LOG_FLOOR) for v in logs]
    w = WIDTH - 2 * MARGIN
    h = (HEIGHT - 2 * MARGIN - PANEL_GAP) / 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    parts += _panel(MARGIN, MARGIN, w, h, ks, gaps, "gap n_k - m_k", f"{min(gaps):g}", f"{max(gaps):g}", "#1f77b4")
    parts += _panel(
        MARGIN, MARGIN + h + PANEL_GAP, w, h, ks, logs,
        "log10 chord upper bound", f"{min(logs):.1f}", f"{max(logs):.1f}", "#d62728",
    )
    parts.append(
        f'<text x="{WIDTH / 2:.2f}" y="{HEIGHT - 12}" font-size="12" text-anchor="middle">k = {ks[0]}..{ks[-1]}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_chart(table: DecayTable, path) -> None:
    svg = render_svg(table)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
