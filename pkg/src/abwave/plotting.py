"""Minimal output renderers: SVG polyline charts and PPM phase maps.

The curves exist for eyeballing; CSV is the contract.  No plotting
dependency: an SVG line chart is a handful of path elements, and a phase
map is a P6 bitmap with hue = (chi + pi) / 2 pi.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["svg_line_chart", "write_phase_map_ppm"]

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f"]

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 64, 16, 28, 44


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for step in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= step * mag:
            break
    step *= mag
    t0 = math.ceil(lo / step) * step
    out = []
    t = t0
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


def svg_line_chart(path, series, title: str = "", xlabel: str = "",
                   ylabel: str = "") -> None:
    """Write a plain line chart.  series is a list of (label, x, y)."""
    xs = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    ys = ys[np.isfinite(ys)]
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad
    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def X(x):
        return _ML + pw * (x - x_lo) / (x_hi - x_lo)

    def Y(y):
        return _MT + ph * (1.0 - (y - y_lo) / (y_hi - y_lo))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    for t in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{X(t):.1f}" y1="{_MT}" x2="{X(t):.1f}" '
                   f'y2="{_H - _MB}" stroke="#eee"/>')
        out.append(f'<text x="{X(t):.1f}" y="{_H - _MB + 16}" '
                   f'text-anchor="middle">{t:g}</text>')
    for t in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{_ML}" y1="{Y(t):.1f}" x2="{_W - _MR}" '
                   f'y2="{Y(t):.1f}" stroke="#eee"/>')
        out.append(f'<text x="{_ML - 6}" y="{Y(t):.1f}" text-anchor="end" '
                   f'dominant-baseline="middle">{t:g}</text>')
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="#444"/>')
    for k, (label, x, y) in enumerate(series):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        good = np.isfinite(y)
        pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in zip(x[good], y[good]))
        color = _COLORS[k % len(_COLORS)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        ly = _MT + 16 + 15 * k
        out.append(f'<line x1="{_W - _MR - 120}" y1="{ly - 4}" '
                   f'x2="{_W - _MR - 96}" y2="{ly - 4}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{_W - _MR - 90}" y="{ly}">{label}</text>')
    if title:
        out.append(f'<text x="{_W / 2:.0f}" y="18" text-anchor="middle" '
                   f'font-size="14">{title}</text>')
    if xlabel:
        out.append(f'<text x="{_ML + pw / 2:.0f}" y="{_H - 8}" '
                   f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{_MT + ph / 2:.0f}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {_MT + ph / 2:.0f})">{ylabel}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def _hue_to_rgb(hue: np.ndarray) -> np.ndarray:
    """Pure-hue HSV wheel (s = v = 1), vectorized; hue in [0, 1)."""
    h6 = (hue % 1.0) * 6.0
    k = np.floor(h6).astype(int) % 6
    f = h6 - np.floor(h6)
    one = np.ones_like(f)
    q = 1.0 - f
    r = np.choose(k, [one, q, 0 * f, 0 * f, f, one])
    g = np.choose(k, [f, one, one, q, 0 * f, 0 * f])
    b = np.choose(k, [0 * f, 0 * f, f, one, one, q])
    return np.stack([r, g, b], axis=-1)


def write_phase_map_ppm(path, values: np.ndarray, h: float,
                        flux_marker: bool = False) -> None:
    """Binary P6 bitmap of arg(values), hue = (chi + pi)/(2 pi), with an
    optional white disk marking the flux at the grid centre."""
    chi = np.angle(values)
    rgb = _hue_to_rgb((chi + math.pi) / (2.0 * math.pi))
    if flux_marker:
        n = values.shape[0]
        c = (n - 1) / 2.0
        iy, ix = np.mgrid[0:n, 0:n]
        disk = (ix - c) ** 2 + (iy - c) ** 2 <= (max(2.0, 0.1 / h)) ** 2
        rgb[disk] = 1.0
    img = (np.clip(rgb, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    # flip so +y points up in the image
    img = img[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P6 {img.shape[1]} {img.shape[0]} 255\n".encode())
        fh.write(img.tobytes())
