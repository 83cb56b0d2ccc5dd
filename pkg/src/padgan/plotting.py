"""Density heatmaps rendered straight to SVG."""

from __future__ import annotations

import json

import contourpy
import numpy as np

BINS = 64
CONTOUR_LEVELS = (0.2, 0.4, 0.6, 0.8)
MAX_SCATTER = 1000
SIZE = 480
BACKGROUND = "#ffffff"


def density_counts(samples, domain, bins: int = BINS) -> np.ndarray:
    """2-D histogram with ``counts[i, j]`` for x-bin i and y-bin j.

    Points outside ``domain`` are clipped into the edge bins so the counts
    always sum to the number of samples.
    """
    (x0, x1), (y0, y1) = domain
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    xs = np.clip(pts[:, 0], x0, x1)
    ys = np.clip(pts[:, 1], y0, y1)
    counts, _, _ = np.histogram2d(xs, ys, bins=bins, range=[[x0, x1], [y0, y1]])
    return counts.astype(int)


def _color(frac: float) -> str:
    # white -> dark blue
    r = int(round(255 * (1 - frac) + 8 * frac))
    g = int(round(255 * (1 - frac) + 48 * frac))
    b = int(round(255 * (1 - frac) + 107 * frac))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_density_svg(samples, quality, training_points=None, title: str = "", bins: int = BINS) -> str:
    domain = quality.domain
    (x0, x1), (y0, y1) = domain
    counts = density_counts(samples, domain, bins)
    sx = SIZE / (x1 - x0)
    sy = SIZE / (y1 - y0)

    def px(x):
        return (np.asarray(x) - x0) * sx

    def py(y):
        return SIZE - (np.asarray(y) - y0) * sy

    cw, ch = SIZE / bins, SIZE / bins
    meta = {
        "bins": bins,
        "domain": [list(domain[0]), list(domain[1])],
        "total": int(counts.sum()),
        "nonzero": [[int(i), int(j), int(counts[i, j])] for i, j in zip(*np.nonzero(counts))],
    }
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE + 24}" '
        f'viewBox="0 -24 {SIZE} {SIZE + 24}">',
        f"<metadata id=\"bin-counts\">{json.dumps(meta, separators=(',', ':'))}</metadata>",
        f'<text x="4" y="-6" font-family="sans-serif" font-size="14">{title}</text>',
        f'<rect id="background" x="0" y="0" width="{SIZE}" height="{SIZE}" fill="{BACKGROUND}"/>',
        '<g id="heatmap" shape-rendering="crispEdges">',
    ]
    peak = counts.max()
    for i, j in zip(*np.nonzero(counts)):
        frac = counts[i, j] / peak
        out.append(
            f'<rect x="{i * cw:.3f}" y="{SIZE - (j + 1) * ch:.3f}" width="{cw:.3f}" '
            f'height="{ch:.3f}" fill="{_color(frac)}" data-count="{counts[i, j]}"/>'
        )
    out.append("</g>")

    if training_points is not None:
        pts = np.asarray(training_points, dtype=float)
        if len(pts) > MAX_SCATTER:
            pts = pts[np.linspace(0, len(pts) - 1, MAX_SCATTER).astype(int)]
        out.append('<g id="training" fill="#2ca02c" fill-opacity="0.5">')
        out.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="1.2"/>' for a, b in zip(px(pts[:, 0]), py(pts[:, 1])))
        out.append("</g>")

    gx = np.linspace(x0, x1, 200)
    gy = np.linspace(y0, y1, 200)
    xx, yy = np.meshgrid(gx, gy)
    zz = quality.evaluate(np.column_stack([xx.ravel(), yy.ravel()])).reshape(xx.shape)
    gen = contourpy.contour_generator(xx, yy, zz)
    out.append('<g id="quality-contours" fill="none" stroke="#d62728" stroke-width="1">')
    for level in CONTOUR_LEVELS:
        for line in gen.lines(level):
            path = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px(line[:, 0]), py(line[:, 1])))
            out.append(f'<polyline data-level="{level}" points="{path}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_density(samples, preset, path, title: str | None = None, training_points=None) -> None:
    """Write the density SVG for ``samples`` under ``preset``'s quality landscape."""
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    if len(pts) == 0:
        raise ValueError("nothing to plot")
    if training_points is None:
        training_points = preset.sample(MAX_SCATTER, seed=0).points
    svg = render_density_svg(pts, preset.quality, training_points, title or preset.name)
    with open(path, "w") as fh:
        fh.write(svg)


def read_bin_counts(svg_text: str) -> dict:
    start = svg_text.index('<metadata id="bin-counts">') + len('<metadata id="bin-counts">')
    end = svg_text.index("</metadata>", start)
    return json.loads(svg_text[start:end])
