"""Networks that attain known maximal/lower-bound region counts.

The core primitive is a single-input layer of n ReLUs whose signed
readout oscillates 0-1-0-1 across n+1 pieces of [0,1] (a zigzag); region
counts multiply when such layers are stacked, and replicating the stack
per input coordinate plus a generic final layer attains the
multi-dimensional lower bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .network import LinearOutput, Network, ReluLayer


@dataclass(frozen=True)
class ZigzagSpec:
    """Solved parameters of an n-unit zigzag layer on [0,1].

    unit_weights/unit_biases define the ReLUs h_i = max(0, w_i x + b_i);
    the readout sum(signs * h) + global_bias maps [0,1] onto [0,1] with
    endpoint values alternating 0,1,0,1,...  Unit i activates exactly at
    breakpoints[i]; every unit points right except unit 3 (index 2),
    which is active left of its breakpoint.
    """

    n: int
    breakpoints: np.ndarray
    unit_weights: np.ndarray
    unit_biases: np.ndarray
    signs: np.ndarray
    global_bias: float

    def readout(self, x):
        """Evaluate the zigzag value at x (scalar or array)."""
        x = np.asarray(x, dtype=float)
        pre = np.multiply.outer(self.unit_weights, x) + np.expand_dims(
            self.unit_biases, tuple(range(1, x.ndim + 1))
        )
        h = np.maximum(pre, 0.0)
        return np.tensordot(self.signs, h, axes=1) + self.global_bias

    def to_network(self):
        """Single hidden layer plus the readout as the linear output."""
        layer = ReluLayer(self.unit_weights.reshape(-1, 1), self.unit_biases)
        out = LinearOutput(self.signs.reshape(1, -1), np.array([self.global_bias]))
        return Network(1, (layer,), out)


def _piece_targets(t):
    """Per-piece affine targets of the zigzag: 0->1 on odd pieces, 1->0 on even.

    t is the Fraction breakpoint list; piece r spans [t[r-1], t[r]] with
    the sentinels t[0] = 0 and t[n+1] = 1.  Returns (slope, const) pairs.
    """
    n = len(t) - 2
    targets = []
    for r in range(1, n + 2):
        span = t[r] - t[r - 1]
        if r % 2 == 1:
            targets.append((Fraction(1) / span, -t[r - 1] / span))
        else:
            targets.append((Fraction(-1) / span, t[r] / span))
    return targets


def zigzag_layer(n):
    """Solve the n-unit zigzag (n >= 3) at the standard breakpoints.

    Breakpoints are fixed to t_1 = 1/(2n+1), t_i = (2i-1)/(2n+1); the
    remaining weights and biases come from back-substitution through the
    per-piece target equations after eliminating unit 3, all in exact
    rational arithmetic.
    """
    if n < 3:
        raise ValueError("zigzag construction needs n >= 3 units")
    den = 2 * n + 1
    t = [Fraction(0)]
    t.append(Fraction(1, den))
    for i in range(2, n + 1):
        t.append(Fraction(2 * i - 1, den))
    t.append(Fraction(1))
    slope, const = zip(*_piece_targets(t))

    w = [Fraction(0)] * (n + 1)  # 1-based
    b = [Fraction(0)] * (n + 1)
    w[3] = slope[0]
    w[1] = slope[1] - slope[0]
    b[1] = const[1] - const[0]
    w[2] = slope[2] - slope[1]
    b[2] = const[2] - const[1]
    # eliminating unit 3 between pieces 3 and 4 must reproduce w[3]
    assert slope[2] - slope[3] == w[3]
    b[3] = const[2] - const[3]
    d = const[0] - b[3]
    for i in range(4, n + 1):
        w[i] = slope[i] - slope[i - 1]
        b[i] = const[i] - const[i - 1]

    # defensive: every piece equation must hold exactly
    active = [{3}, {1, 3}, {1, 2, 3}, {1, 2}]
    for r in range(5, n + 2):
        active.append({1, 2} | set(range(4, r)))
    for r in range(n + 1):
        ssum = sum((w[i] for i in active[r]), Fraction(0))
        csum = sum((b[i] for i in active[r]), d)
        assert ssum == slope[r] and csum == const[r]

    signs = []
    for i in range(1, n + 1):
        if i == 3:
            signs.append(-1.0 if w[i] >= 0 else 1.0)
        else:
            signs.append(1.0 if w[i] >= 0 else -1.0)
    signs = np.array(signs)
    wt = signs * np.array([float(w[i]) for i in range(1, n + 1)])
    bt = signs * np.array([float(b[i]) for i in range(1, n + 1)])
    return ZigzagSpec(
        n=n,
        breakpoints=np.array([float(ti) for ti in t[1:-1]]),
        unit_weights=wt,
        unit_biases=bt,
        signs=signs,
        global_bias=float(d),
    )


def deep_1d(widths):
    """Stack zigzag layers on one input; exact region count prod(n_l + 1) on [0,1].

    Each layer's signed readout is folded into the next layer's
    preactivation, so no neurons are spent on the readout.
    """
    widths = [int(w) for w in widths]
    if not widths:
        raise ValueError("need at least one layer width")
    if any(w < 3 for w in widths):
        raise ValueError("every width must be >= 3")
    specs = [zigzag_layer(w) for w in widths]
    layers = [ReluLayer(specs[0].unit_weights.reshape(-1, 1), specs[0].unit_biases)]
    for prev, spec in zip(specs, specs[1:]):
        weights = np.outer(spec.unit_weights, prev.signs)
        bias = spec.unit_weights * prev.global_bias + spec.unit_biases
        layers.append(ReluLayer(weights, bias))
    last = specs[-1]
    out = LinearOutput(last.signs.reshape(1, -1), np.array([last.global_bias]))
    return Network(1, tuple(layers), out)


def _generic_hyperplanes(n0, count, rng):
    """count unit normals plus offsets whose arrangement is generic inside (0,1)^n0.

    Hyperplanes are tangent to a sphere centred at the cube midpoint; the
    radius is shrunk until every vertex of the arrangement (intersection
    of any n0 of them) lies well inside the cube, which makes the cube see
    the full generic region count.
    """
    if n0 == 1:
        jitter = rng.uniform(-0.2, 0.2, size=count)
        points = (np.arange(count) + 0.5 + jitter) / count
        normals = np.ones((count, 1))
        return normals, -points.reshape(count)

    for attempt in range(200):
        if n0 == 2:
            jitter = rng.uniform(-0.2, 0.2, size=count)
            theta = np.pi * (np.arange(count) + 0.5 + jitter) / count
            normals = np.column_stack([np.cos(theta), np.sin(theta)])
        else:
            normals = rng.normal(size=(count, n0))
            normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        worst = 0.0
        ok = True
        for subset in itertools.combinations(range(count), n0):
            A = normals[list(subset)]
            det = np.linalg.det(A)
            if abs(det) <= 1e-9:
                ok = False
                break
            reach = float(np.linalg.norm(np.linalg.solve(A, np.ones(n0))))
            worst = max(worst, reach)
        if not ok or worst > 40.0:
            continue
        # no n0+1 hyperplanes may meet in a point
        concurrent = False
        for subset in itertools.combinations(range(count), n0 + 1):
            A = normals[list(subset[:n0])]
            vertex = np.linalg.solve(A, np.ones(n0))
            extra = normals[subset[n0]]
            if abs(extra @ vertex - 1.0) <= 1e-9:
                concurrent = True
                break
        if concurrent:
            continue
        radius = 0.4 / worst
        center = np.full(n0, 0.5)
        offsets = -(normals @ center + radius)
        return normals, offsets
    raise RuntimeError("could not draw a generic hyperplane arrangement")


def multi_dim(n0, widths, seed):
    """Replicated zigzag stacks per coordinate plus a generic final layer.

    Layers 1..L-1 are block-diagonal zigzags (floor(n_l/n0) units per
    coordinate, remainder units zero); the last layer realizes n_L
    hyperplanes in general position over the readout cube (0,1)^n0.
    """
    widths = [int(w) for w in widths]
    n0 = int(n0)
    if n0 < 1 or not widths:
        raise ValueError("need n0 >= 1 and at least one width")
    if any(w < 3 * n0 for w in widths):
        raise ValueError("every width must be >= 3 * n0")
    rng = np.random.default_rng(seed)
    L = len(widths)

    specs = []
    layers = []
    prev_block = None  # (units per coordinate, spec) of the previous layer
    for l in range(L - 1):
        p = widths[l] // n0
        spec = zigzag_layer(p)
        W = np.zeros((widths[l], n0 if l == 0 else widths[l - 1]))
        bias = np.zeros(widths[l])
        for blk in range(n0):
            rows = slice(blk * p, (blk + 1) * p)
            if l == 0:
                W[rows, blk] = spec.unit_weights
                bias[rows] = spec.unit_biases
            else:
                q, prev = prev_block
                cols = slice(blk * q, (blk + 1) * q)
                W[rows, cols] = np.outer(spec.unit_weights, prev.signs)
                bias[rows] = spec.unit_weights * prev.global_bias + spec.unit_biases
        layers.append(ReluLayer(W, bias))
        specs.append(spec)
        prev_block = (p, spec)

    normals, offsets = _generic_hyperplanes(n0, widths[-1], rng)
    W = np.zeros((widths[-1], n0 if L == 1 else widths[-2]))
    bias = np.zeros(widths[-1])
    for r in range(widths[-1]):
        if L == 1:
            W[r] = normals[r]
            bias[r] = offsets[r]
        else:
            q, prev = prev_block
            for blk in range(n0):
                cols = slice(blk * q, (blk + 1) * q)
                W[r, cols] = normals[r, blk] * prev.signs
            bias[r] = normals[r].sum() * prev.global_bias + offsets[r]
    layers.append(ReluLayer(W, bias))
    return Network(n0, tuple(layers))


def predicted_deep_1d_count(widths):
    """Exact region count of deep_1d(widths) on [0,1]."""
    total = 1
    for w in widths:
        total *= int(w) + 1
    return total
