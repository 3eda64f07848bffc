"""SVG rendering of 2D region partitions by exact halfplane clipping.

Each counted region is the intersection of its pattern's halfplanes with
the box, a convex polygon obtained by clipping the box rectangle against
every constraint row; no sampling is involved, so thin slivers render
correctly and the polygon count matches the counter.
"""

from __future__ import annotations

import numpy as np

from .network import ReluLayer

_CLIP_EPS = 1e-12

_PALETTE = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
]


def clip_polygon(points, a, c):
    """Clip a convex polygon against the halfplane a.x <= c."""
    if not points:
        return []
    out = []
    n = len(points)
    for i in range(n):
        p = points[i]
        q = points[(i + 1) % n]
        fp = a[0] * p[0] + a[1] * p[1] - c
        fq = a[0] * q[0] + a[1] * q[1] - c
        if fp <= _CLIP_EPS:
            out.append(p)
            if fq > _CLIP_EPS and fp < -_CLIP_EPS:
                t = fp / (fp - fq)
                out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
        elif fq < -_CLIP_EPS:
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def region_halfplanes(network, pattern):
    """Constraint rows (a, c) meaning a.x <= c that carve the pattern's region."""
    rows = []
    n0 = network.input_dim
    M = np.eye(n0)
    o = np.zeros(n0)
    for layer, entry in zip(network.layers, pattern):
        if isinstance(layer, ReluLayer):
            A = layer.weights @ M
            cv = layer.weights @ o + layer.bias
            for i in range(layer.width):
                if i in entry:
                    rows.append((-A[i].copy(), cv[i]))  # a.x + b >= 0
                else:
                    rows.append((A[i].copy(), -cv[i]))
            keep = np.zeros(layer.width, dtype=bool)
            if entry:
                keep[list(entry)] = True
            A[~keep] = 0.0
            cv[~keep] = 0.0
            M, o = A, cv
        else:
            A = np.einsum("kij,jd->kid", layer.weights, M)
            cv = layer.weights @ o + layer.bias
            for i, j in enumerate(entry):
                for jp in range(layer.rank):
                    if jp != j:
                        d = A[j, i] - A[jp, i]
                        e = cv[j, i] - cv[jp, i]
                        rows.append((-d, e))  # branch j dominates jp
            winners = np.asarray(entry, dtype=int)
            sel = layer.weights[winners, np.arange(layer.width)]
            bsel = layer.bias[winners, np.arange(layer.width)]
            M, o = sel @ M, sel @ o + bsel
    return rows


def region_polygon(network, pattern, box):
    """Vertices of the region clipped to the box (may be empty/degenerate)."""
    lo, hi = box.lower, box.upper
    poly = [(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])]
    for a, c in region_halfplanes(network, pattern):
        poly = clip_polygon(poly, a, c)
        if not poly:
            break
    return poly


def render_svg(network, box, witnesses, width=640, height=640):
    """One closed polygon per witnessed region over the box; deterministic bytes."""
    if network.input_dim != 2:
        raise ValueError("SVG rendering requires a 2-input network")
    lo, hi = box.lower, box.upper
    sx = width / (hi[0] - lo[0])
    sy = height / (hi[1] - lo[1])

    def to_px(p):
        return ((p[0] - lo[0]) * sx, height - (p[1] - lo[1]) * sy)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    polygons = 0
    for idx, w in enumerate(witnesses):
        poly = region_polygon(network, w.pattern, box)
        if len(poly) < 3:
            continue
        pts = " ".join("%.4f,%.4f" % to_px(p) for p in poly)
        color = _PALETTE[idx % len(_PALETTE)]
        lines.append(
            f'<polygon points="{pts}" fill="{color}" stroke="black" stroke-width="0.8"/>'
        )
        polygons += 1
    lines.append("</svg>")
    return "\n".join(lines) + "\n", polygons
