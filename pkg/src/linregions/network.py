"""Layered piecewise-linear network model.

Networks are immutable stacks of ReLU or rank-k maxout layers with an
optional linear readout.  The module owns forward evaluation, activation
patterns, region-restricted affine maps in input space, image-dimension
diagnostics, and the on-disk JSON format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

RANK_TOL = 1e-8


class NetworkFormatError(ValueError):
    """Raised for malformed network documents; message names the field."""


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ReluLayer:
    """max(0, W h + b) layer; weights has shape (width, fan_in)."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(np.atleast_2d(self.weights)))
        object.__setattr__(self, "bias", _frozen(np.atleast_1d(self.bias)))

    @property
    def width(self):
        return self.weights.shape[0]

    @property
    def fan_in(self):
        return self.weights.shape[1]


@dataclass(frozen=True)
class MaxoutLayer:
    """max_j (W_j h + b_j) layer; weights has shape (rank, width, fan_in)."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 3:
            raise ValueError("maxout weights must be a (rank, width, fan_in) stack")
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "bias", _frozen(np.atleast_2d(self.bias)))

    @property
    def rank(self):
        return self.weights.shape[0]

    @property
    def width(self):
        return self.weights.shape[1]

    @property
    def fan_in(self):
        return self.weights.shape[2]


@dataclass(frozen=True)
class LinearOutput:
    """Affine readout without activation; ignored by region machinery."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(np.atleast_2d(self.weights)))
        object.__setattr__(self, "bias", _frozen(np.atleast_1d(self.bias)))


@dataclass(frozen=True)
class Network:
    input_dim: int
    layers: tuple = ()
    output: LinearOutput | None = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def widths(self):
        return tuple(layer.width for layer in self.layers)

    @property
    def num_neurons(self):
        return sum(self.widths)

    @property
    def is_relu(self):
        return all(isinstance(layer, ReluLayer) for layer in self.layers)


@dataclass(frozen=True)
class ActivationPattern:
    """Per-layer region identifier.

    ReLU entries are frozensets of strictly-positive neuron indices;
    maxout entries are tuples of winning branch indices.  All indices are
    zero-based.
    """

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def to_json(self):
        out = []
        for entry in self.entries:
            if isinstance(entry, frozenset):
                out.append(sorted(entry))
            else:
                out.append(list(entry))
        return out

    @staticmethod
    def from_json(data, network):
        entries = []
        for entry, layer in zip(data, network.layers):
            if isinstance(layer, ReluLayer):
                entries.append(frozenset(entry))
            else:
                entries.append(tuple(entry))
        return ActivationPattern(tuple(entries))


@dataclass(frozen=True)
class Box:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = _frozen(np.atleast_1d(self.lower))
        hi = _frozen(np.atleast_1d(self.upper))
        if lo.shape != hi.shape:
            raise ValueError("box lower/upper lengths differ")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("box bounds must be finite")
        if (lo > hi).any():
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.shape[0]

    @staticmethod
    def uniform(lo, hi, dim):
        return Box(np.full(dim, float(lo)), np.full(dim, float(hi)))


@dataclass(frozen=True)
class Unrestricted:
    pass


@dataclass(frozen=True)
class AffineMap:
    """x -> matrix @ x + offset; one row per neuron (or maxout branch)."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(np.atleast_2d(self.matrix)))
        object.__setattr__(self, "offset", _frozen(np.atleast_1d(self.offset)))

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float) + self.offset


def validate(network):
    """Return every shape/finiteness violation; empty list iff valid."""
    violations = []
    if network.input_dim < 1:
        violations.append("input_dim must be a positive integer")
    fan_in = network.input_dim
    for idx, layer in enumerate(network.layers, start=1):
        if isinstance(layer, ReluLayer):
            w, b = layer.weights, layer.bias
            if w.shape[1] != fan_in:
                violations.append(
                    f"layer {idx}: weight matrix is {w.shape[0]}x{w.shape[1]}, "
                    f"expected fan-in {fan_in}"
                )
            if b.shape[0] != w.shape[0]:
                violations.append(
                    f"layer {idx}: bias length {b.shape[0]} != width {w.shape[0]}"
                )
            if not np.isfinite(w).all() or not np.isfinite(b).all():
                violations.append(f"layer {idx}: non-finite weight or bias")
        elif isinstance(layer, MaxoutLayer):
            w, b = layer.weights, layer.bias
            if layer.rank < 2:
                violations.append(f"layer {idx}: maxout rank must be >= 2")
            if w.shape[2] != fan_in:
                violations.append(
                    f"layer {idx}: weight stack is {w.shape}, expected fan-in {fan_in}"
                )
            if b.shape != (w.shape[0], w.shape[1]):
                violations.append(
                    f"layer {idx}: bias stack {b.shape} != (rank, width) {w.shape[:2]}"
                )
            if not np.isfinite(w).all() or not np.isfinite(b).all():
                violations.append(f"layer {idx}: non-finite weight or bias")
        else:
            violations.append(f"layer {idx}: unknown layer type {type(layer).__name__}")
        fan_in = layer.width
    if network.output is not None:
        w, b = network.output.weights, network.output.bias
        if w.shape[1] != fan_in:
            violations.append(
                f"output: weight matrix is {w.shape[0]}x{w.shape[1]}, "
                f"expected fan-in {fan_in}"
            )
        if b.shape[0] != w.shape[0]:
            violations.append(f"output: bias length {b.shape[0]} != width {w.shape[0]}")
        if not np.isfinite(w).all() or not np.isfinite(b).all():
            violations.append("output: non-finite weight or bias")
    return violations


def forward(network, x):
    """Evaluate the network; returns (output, ActivationPattern).

    A ReLU neuron belongs to the active set only when its preactivation
    is strictly positive; maxout ties go to the lowest branch index.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (network.input_dim,):
        raise ValueError(f"input has shape {x.shape}, expected ({network.input_dim},)")
    h = x
    entries = []
    for layer in network.layers:
        if isinstance(layer, ReluLayer):
            pre = layer.weights @ h + layer.bias
            entries.append(frozenset(int(i) for i in np.nonzero(pre > 0.0)[0]))
            h = np.maximum(pre, 0.0)
        else:
            g = layer.weights @ h + layer.bias  # (rank, width)
            winners = np.argmax(g, axis=0)
            entries.append(tuple(int(j) for j in winners))
            h = g[winners, np.arange(layer.width)]
    if network.output is not None:
        h = network.output.weights @ h + network.output.bias
    return h, ActivationPattern(tuple(entries))


def _hidden_map(network, pattern, depth):
    """Affine map x -> h^depth inside the region fixed by pattern."""
    n0 = network.input_dim
    M = np.eye(n0)
    o = np.zeros(n0)
    for l in range(depth):
        layer = network.layers[l]
        entry = pattern[l]
        if isinstance(layer, ReluLayer):
            A = layer.weights @ M
            cvec = layer.weights @ o + layer.bias
            keep = np.zeros(layer.width, dtype=bool)
            if entry:
                keep[list(entry)] = True
            A[~keep] = 0.0
            cvec[~keep] = 0.0
            M, o = A, cvec
        else:
            winners = np.asarray(entry, dtype=int)
            rows = layer.weights[winners, np.arange(layer.width)]  # (width, fan_in)
            bsel = layer.bias[winners, np.arange(layer.width)]
            M = rows @ M
            o = rows @ o + bsel
    return M, o


def compose_region_map(network, prefix, layer):
    """Input-space preactivation map of `layer` (1-based) inside `prefix`.

    The prefix must cover layers 1..layer-1.  ReLU layers contribute one
    row per neuron; maxout layers contribute rank*width rows grouped
    neuron-major (all branches of neuron 0, then neuron 1, ...).
    """
    if not 1 <= layer <= len(network.layers):
        raise ValueError(f"layer {layer} out of range 1..{len(network.layers)}")
    if len(prefix) != layer - 1:
        raise ValueError(
            f"prefix covers {len(prefix)} layers, expected {layer - 1}"
        )
    M, o = _hidden_map(network, prefix, layer - 1)
    target = network.layers[layer - 1]
    if isinstance(target, ReluLayer):
        return AffineMap(target.weights @ M, target.weights @ o + target.bias)
    k, width, _ = target.weights.shape
    rows = np.empty((width * k, network.input_dim))
    offs = np.empty(width * k)
    for i in range(width):
        for j in range(k):
            rows[i * k + j] = target.weights[j, i] @ M
            offs[i * k + j] = target.weights[j, i] @ o + target.bias[j, i]
    return AffineMap(rows, offs)


def region_image_dimension(network, pattern, rank_tol=RANK_TOL):
    """Numerical rank of the composed weight map x -> h^l for l = len(pattern).

    Singular values at or below rank_tol * max(largest_sv, 1) count as
    zero, so an all-inactive pattern has dimension 0.
    """
    M, _ = _hidden_map(network, pattern, len(pattern))
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0:
        return 0
    cut = rank_tol * max(float(sv[0]), 1.0)
    return int(np.count_nonzero(sv > cut))


# --- on-disk format ----------------------------------------------------

def _as_matrix(data, path):
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise NetworkFormatError(f"{path}: expected a non-empty list of rows")
    width = len(data[0])
    for r, row in enumerate(data):
        if len(row) != width:
            raise NetworkFormatError(f"{path}[{r}]: ragged row")
        for v in row:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise NetworkFormatError(f"{path}[{r}]: non-numeric entry")
    return np.array(data, dtype=float)


def _as_vector(data, path):
    if not isinstance(data, list):
        raise NetworkFormatError(f"{path}: expected a list of numbers")
    for v in data:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise NetworkFormatError(f"{path}: non-numeric entry")
    return np.array(data, dtype=float)


def network_to_json(network):
    doc = {"input_dim": int(network.input_dim), "layers": []}
    for layer in network.layers:
        if isinstance(layer, ReluLayer):
            doc["layers"].append(
                {
                    "type": "relu",
                    "weights": layer.weights.tolist(),
                    "bias": layer.bias.tolist(),
                }
            )
        else:
            doc["layers"].append(
                {
                    "type": "maxout",
                    "rank": int(layer.rank),
                    "weights": [w.tolist() for w in layer.weights],
                    "bias": [b.tolist() for b in layer.bias],
                }
            )
    if network.output is not None:
        doc["output"] = {
            "weights": network.output.weights.tolist(),
            "bias": network.output.bias.tolist(),
        }
    return doc


def network_from_json(doc):
    if not isinstance(doc, dict):
        raise NetworkFormatError("document root must be an object")
    if "input_dim" not in doc:
        raise NetworkFormatError("input_dim: missing")
    n0 = doc["input_dim"]
    if not isinstance(n0, int) or isinstance(n0, bool) or n0 < 1:
        raise NetworkFormatError("input_dim: must be a positive integer")
    raw_layers = doc.get("layers", [])
    if not isinstance(raw_layers, list):
        raise NetworkFormatError("layers: expected a list")
    layers = []
    for idx, entry in enumerate(raw_layers, start=1):
        path = f"layers[{idx - 1}]"
        if not isinstance(entry, dict):
            raise NetworkFormatError(f"{path}: expected an object")
        kind = entry.get("type")
        if kind == "relu":
            for key in ("weights", "bias"):
                if key not in entry:
                    raise NetworkFormatError(f"{path}.{key}: missing")
            layers.append(
                ReluLayer(
                    _as_matrix(entry["weights"], f"{path}.weights"),
                    _as_vector(entry["bias"], f"{path}.bias"),
                )
            )
        elif kind == "maxout":
            for key in ("rank", "weights", "bias"):
                if key not in entry:
                    raise NetworkFormatError(f"{path}.{key}: missing")
            rank = entry["rank"]
            if not isinstance(rank, int) or isinstance(rank, bool) or rank < 2:
                raise NetworkFormatError(f"{path}.rank: rank must be >= 2")
            ws = entry["weights"]
            bs = entry["bias"]
            if not isinstance(ws, list) or len(ws) != rank:
                raise NetworkFormatError(f"{path}.weights: expected {rank} matrices")
            if not isinstance(bs, list) or len(bs) != rank:
                raise NetworkFormatError(f"{path}.bias: expected {rank} vectors")
            wstack = [_as_matrix(w, f"{path}.weights[{j}]") for j, w in enumerate(ws)]
            bstack = [_as_vector(b, f"{path}.bias[{j}]") for j, b in enumerate(bs)]
            shapes = {w.shape for w in wstack}
            if len(shapes) != 1:
                raise NetworkFormatError(f"{path}.weights: branch shapes differ")
            layers.append(MaxoutLayer(np.stack(wstack), np.stack(bstack)))
        else:
            raise NetworkFormatError(f"{path}.type: unknown layer type {kind!r}")
    output = None
    if doc.get("output") is not None:
        entry = doc["output"]
        if not isinstance(entry, dict):
            raise NetworkFormatError("output: expected an object")
        for key in ("weights", "bias"):
            if key not in entry:
                raise NetworkFormatError(f"output.{key}: missing")
        output = LinearOutput(
            _as_matrix(entry["weights"], "output.weights"),
            _as_vector(entry["bias"], "output.bias"),
        )
    network = Network(n0, tuple(layers), output)
    problems = validate(network)
    if problems:
        raise NetworkFormatError("; ".join(problems))
    return network


def write_network(network, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_json(network), fh, indent=1)
        fh.write("\n")


def read_network(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"not valid JSON: {exc}") from exc
    return network_from_json(doc)
