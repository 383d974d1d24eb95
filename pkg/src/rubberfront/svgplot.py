"""Minimal SVG line plots written directly, without a plotting dependency.

Two entry points: :func:`line_plot` for linear axes and :func:`loglog_plot`
for log-log convergence plots with optional dashed slope guide lines.  The
output is a standalone SVG document as a string.
"""

from __future__ import annotations

import math

__all__ = ["line_plot", "loglog_plot"]

_COLORS = ("#1f6fb4", "#d1452c", "#2c8c4a", "#8a5cb8", "#b8860b", "#3aa7a7")
_MARKERS = ("circle", "diamond", "triangle", "square", "circle", "diamond")

_W, _H = 640, 460
_ML, _MR, _MT, _MB = 70, 160, 40, 55


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:g}"


def _marker(kind: str, x: float, y: float, color: str) -> str:
    if kind == "circle":
        return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="{color}"/>'
    if kind == "square":
        return f'<rect x="{x - 3.5:.2f}" y="{y - 3.5:.2f}" width="7" height="7" fill="{color}"/>'
    if kind == "diamond":
        pts = f"{x:.2f},{y - 4.5:.2f} {x + 4.5:.2f},{y:.2f} {x:.2f},{y + 4.5:.2f} {x - 4.5:.2f},{y:.2f}"
    else:
        pts = f"{x:.2f},{y - 4.5:.2f} {x + 4:.2f},{y + 3.5:.2f} {x - 4:.2f},{y + 3.5:.2f}"
    return f'<polygon points="{pts}" fill="{color}"/>'


def _axes_ticks(lo: float, hi: float, n: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    raw = span / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            stepv = mult * mag
            break
    first = math.ceil(lo / stepv) * stepv
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(t)
        t += stepv
    return ticks


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="Helvetica, Arial, sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_ML + (_W - _ML - _MR) / 2:.0f}" y="24" text-anchor="middle" '
        f'font-size="14">{title}</text>',
    ]


def _frame_and_labels(xlabel: str, ylabel: str) -> list[str]:
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    return [
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
        f'<text x="{x0 + (x1 - x0) / 2:.0f}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>',
        f'<text x="18" y="{y1 + (y0 - y1) / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {y1 + (y0 - y1) / 2:.0f})">{ylabel}</text>',
    ]


def _legend(names) -> list[str]:
    out = []
    lx = _W - _MR + 12
    for i, name in enumerate(names):
        ly = _MT + 16 + 20 * i
        color = _COLORS[i % len(_COLORS)]
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(_marker(_MARKERS[i % len(_MARKERS)], lx + 11, ly, color))
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{name}</text>')
    return out


def line_plot(series, xlabel: str = "", ylabel: str = "", title: str = "",
              markers: bool = False) -> str:
    """Linear-axes plot of (name, x, y) series."""
    xs = [float(v) for _, x, _ in series for v in x]
    ys = [float(v) for _, _, y in series for v in y]
    if not xs:
        raise ValueError("no data to plot")
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi == xlo:
        xhi = xlo + 1.0
    if yhi == ylo:
        yhi = ylo + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo -= pad
    yhi += pad

    def px(v):
        return _ML + (v - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def py(v):
        return (_H - _MB) - (v - ylo) / (yhi - ylo) * (_H - _MB - _MT)

    parts = _header(title)
    for t in _axes_ticks(xlo, xhi):
        parts.append(f'<line x1="{px(t):.2f}" y1="{_H - _MB}" x2="{px(t):.2f}" '
                     f'y2="{_H - _MB + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px(t):.2f}" y="{_H - _MB + 18}" '
                     f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _axes_ticks(ylo, yhi):
        parts.append(f'<line x1="{_ML - 5}" y1="{py(t):.2f}" x2="{_ML}" '
                     f'y2="{py(t):.2f}" stroke="#333"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py(t):.2f}" dy="4" '
                     f'text-anchor="end">{_fmt(t)}</text>')
    for i, (name, x, y) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(float(a)):.2f},{py(float(b)):.2f}" for a, b in zip(x, y))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        if markers:
            for a, b in zip(x, y):
                parts.append(_marker(_MARKERS[i % len(_MARKERS)],
                                     px(float(a)), py(float(b)), color))
    parts += _frame_and_labels(xlabel, ylabel)
    parts += _legend([name for name, _, _ in series])
    parts.append("</svg>")
    return "\n".join(parts)


def loglog_plot(series, xlabel: str = "", ylabel: str = "", title: str = "",
                guide_slopes=()) -> str:
    """Log-log plot with markers and dashed slope guide lines.

    Nonpositive values are dropped per series.  Guide lines are anchored at
    the last point of the first series.
    """
    clean = []
    for name, x, y in series:
        pairs = [(float(a), float(b)) for a, b in zip(x, y) if a > 0 and b > 0]
        if pairs:
            clean.append((name, pairs))
    if not clean:
        raise ValueError("no positive data to plot")
    xs = [a for _, pairs in clean for a, _ in pairs]
    ys = [b for _, pairs in clean for _, b in pairs]
    lx0, lx1 = math.log10(min(xs)), math.log10(max(xs))
    ly0, ly1 = math.log10(min(ys)), math.log10(max(ys))
    lx0 -= 0.08 * max(lx1 - lx0, 0.5)
    lx1 += 0.08 * max(lx1 - lx0, 0.5)
    ly0 -= 0.08 * max(ly1 - ly0, 0.5)
    ly1 += 0.08 * max(ly1 - ly0, 0.5)

    def px(v):
        return _ML + (math.log10(v) - lx0) / (lx1 - lx0) * (_W - _ML - _MR)

    def py(v):
        return (_H - _MB) - (math.log10(v) - ly0) / (ly1 - ly0) * (_H - _MB - _MT)

    parts = _header(title)
    for d in range(math.floor(lx0), math.ceil(lx1) + 1):
        v = 10.0 ** d
        if lx0 <= d <= lx1:
            parts.append(f'<line x1="{px(v):.2f}" y1="{_MT}" x2="{px(v):.2f}" '
                         f'y2="{_H - _MB}" stroke="#ddd"/>')
            parts.append(f'<text x="{px(v):.2f}" y="{_H - _MB + 18}" '
                         f'text-anchor="middle">1e{d}</text>')
    for d in range(math.floor(ly0), math.ceil(ly1) + 1):
        v = 10.0 ** d
        if ly0 <= d <= ly1:
            parts.append(f'<line x1="{_ML}" y1="{py(v):.2f}" x2="{_W - _MR}" '
                         f'y2="{py(v):.2f}" stroke="#ddd"/>')
            parts.append(f'<text x="{_ML - 8}" y="{py(v):.2f}" dy="4" '
                         f'text-anchor="end">1e{d}</text>')

    anchor_x, anchor_y = clean[0][1][-1]
    for slope in guide_slopes:
        gx0 = 10.0 ** (lx0 + 0.05 * (lx1 - lx0))
        gx1 = 10.0 ** (lx1 - 0.05 * (lx1 - lx0))
        gy = lambda v: anchor_y * 0.5 * (v / anchor_x) ** slope
        parts.append(f'<line x1="{px(gx0):.2f}" y1="{py(gy(gx0)):.2f}" '
                     f'x2="{px(gx1):.2f}" y2="{py(gy(gx1)):.2f}" '
                     'stroke="#888" stroke-width="1.2" stroke-dasharray="6 4"/>')
        parts.append(f'<text x="{px(gx1):.2f}" y="{py(gy(gx1)) - 6:.2f}" '
                     f'text-anchor="end" fill="#888">slope {slope:g}</text>')

    for i, (name, pairs) in enumerate(clean):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in pairs)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        for a, b in pairs:
            parts.append(_marker(_MARKERS[i % len(_MARKERS)], px(a), py(b), color))
    parts += _frame_and_labels(xlabel, ylabel)
    parts += _legend([name for name, _ in clean])
    parts.append("</svg>")
    return "\n".join(parts)
