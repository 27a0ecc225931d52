"""Minimal hand-rolled SVG output for sweep curves and mode-grid heatmaps.

Diagnostic plots only: rects, paths and text, no charting dependency.
"""

from __future__ import annotations

import math

import numpy as np

# viridis-like anchors, interpolated linearly
_STOPS = [
    (0.0, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.5, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.0, (253, 231, 37)),
]


def _color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(_STOPS, _STOPS[1:]):
        if t <= t1:
            w = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            rgb = [round(a + w * (b - a)) for a, b in zip(c0, c1)]
            return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"
    return "rgb(253,231,37)"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def heatmap_panels(
    panels: list[list[np.ndarray]],
    row_labels: list[str],
    col_labels: list[str],
    titles: list[list[str]],
    path,
    cell_px: float = 2.0,
    pad: float = 34.0,
) -> None:
    """Grid of square heatmaps; each panel annotated with its title above."""
    nrow, ncol = len(panels), len(panels[0])
    sizes = [[p.shape[0] for p in row] for row in panels]
    panel_w = max(max(n for n in row) for row in sizes) * cell_px
    width = pad + ncol * (panel_w + pad)
    height = pad + nrow * (panel_w + pad) + 10
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for r in range(nrow):
        for c in range(ncol):
            arr = np.asarray(panels[r][c], dtype=float)
            n = arr.shape[0]
            px = panel_w / n
            x0 = pad + c * (panel_w + pad)
            y0 = pad + r * (panel_w + pad)
            lo, hi = float(arr.min()), float(arr.max())
            span = hi - lo if hi > lo else 1.0
            out.append(
                f'<text x="{x0 + panel_w / 2:.1f}" y="{y0 - 6:.1f}" font-size="9" '
                f'text-anchor="middle" font-family="sans-serif">{_esc(titles[r][c])}</text>'
            )
            for a in range(n):
                row_vals = (arr[a] - lo) / span
                for b in range(n):
                    out.append(
                        f'<rect x="{x0 + b * px:.2f}" y="{y0 + a * px:.2f}" '
                        f'width="{px:.2f}" height="{px:.2f}" fill="{_color(row_vals[b])}"/>'
                    )
            if c == 0:
                out.append(
                    f'<text x="{x0 - 8:.1f}" y="{y0 + panel_w / 2:.1f}" font-size="9" '
                    f'text-anchor="middle" font-family="sans-serif" '
                    f'transform="rotate(-90 {x0 - 8:.1f} {y0 + panel_w / 2:.1f})">'
                    f"{_esc(row_labels[r])}</text>"
                )
            if r == nrow - 1:
                out.append(
                    f'<text x="{x0 + panel_w / 2:.1f}" y="{y0 + panel_w + 14:.1f}" '
                    f'font-size="9" text-anchor="middle" font-family="sans-serif">'
                    f"{_esc(col_labels[c])}</text>"
                )
    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def loglog_chart(series: dict[str, tuple[np.ndarray, np.ndarray]], path,
                 xlabel: str = "eps", ylabel: str = "value",
                 width: float = 420.0, height: float = 300.0) -> None:
    """Log-log polylines with point markers and a text legend."""
    pad = 46.0
    xs = np.concatenate([np.log10(np.asarray(v[0], dtype=float)) for v in series.values()])
    ys = np.concatenate([np.log10(np.asarray(v[1], dtype=float)) for v in series.values()])
    x_lo, x_hi = xs.min(), xs.max()
    y_lo, y_hi = ys.min(), ys.max()
    x_hi += 0.05 * max(x_hi - x_lo, 1e-9)
    y_hi += 0.05 * max(y_hi - y_lo, 1e-9)

    def to_px(x, y):
        sx = pad + (x - x_lo) / max(x_hi - x_lo, 1e-9) * (width - 2 * pad)
        sy = height - pad - (y - y_lo) / max(y_hi - y_lo, 1e-9) * (height - 2 * pad)
        return sx, sy

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="black" stroke-width="1"/>',
        f'<text x="{width / 2:.0f}" y="{height - 8:.0f}" font-size="10" text-anchor="middle" '
        f'font-family="sans-serif">log10 {_esc(xlabel)}</text>',
        f'<text x="12" y="{height / 2:.0f}" font-size="10" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 12 {height / 2:.0f})">'
        f"log10 {_esc(ylabel)}</text>",
    ]
    for tick in np.linspace(x_lo, x_hi, 4):
        px, _ = to_px(tick, y_lo)
        out.append(f'<text x="{px:.1f}" y="{height - pad + 14:.1f}" font-size="8" '
                   f'text-anchor="middle" font-family="sans-serif">{tick:.2f}</text>')
    for tick in np.linspace(y_lo, y_hi, 4):
        _, py = to_px(x_lo, tick)
        out.append(f'<text x="{pad - 6:.1f}" y="{py + 3:.1f}" font-size="8" '
                   f'text-anchor="end" font-family="sans-serif">{tick:.2f}</text>')
    for k, (label, (ex, ev)) in enumerate(series.items()):
        color = _SERIES_COLORS[k % len(_SERIES_COLORS)]
        pts = [to_px(math.log10(x), math.log10(y)) for x, y in zip(ex, ev)]
        d = " ".join(f"{'M' if i == 0 else 'L'}{x:.1f},{y:.1f}" for i, (x, y) in enumerate(pts))
        out.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts:
            out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.4" fill="{color}"/>')
        out.append(f'<text x="{pad + 6:.1f}" y="{pad + 12 + 11 * k:.1f}" font-size="9" '
                   f'fill="{color}" font-family="sans-serif">{_esc(label)}</text>')
    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
