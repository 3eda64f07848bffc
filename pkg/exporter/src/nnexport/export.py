"""Convert raw weight/bias arrays into the linregions network JSON document.

The emitted schema is the counting tool's on-disk contract:
{"input_dim": int, "layers": [{"type": "relu"|"maxout", ...}], "output": {...}?}
with row-major weight matrices (one row per neuron) and full double
precision numbers.
"""

from __future__ import annotations

import json

import numpy as np

SUPPORTED_TAGS = ("relu", "maxout", "linear")


class ExportError(ValueError):
    """Raised when arrays and activation tags do not form a valid network."""


def _check_matrix(w, fan_in, where):
    w = np.asarray(w, dtype=float)
    if w.ndim != 2:
        raise ExportError(f"{where}: weights must be 2-D, got shape {w.shape}")
    if w.shape[1] != fan_in:
        raise ExportError(
            f"{where}: weight matrix is {w.shape[0]}x{w.shape[1]}, "
            f"expected fan-in {fan_in} (transposed?)"
        )
    if not np.isfinite(w).all():
        raise ExportError(f"{where}: non-finite weights")
    return w


def _check_vector(b, width, where):
    b = np.asarray(b, dtype=float)
    if b.shape != (width,):
        raise ExportError(f"{where}: bias has shape {b.shape}, expected ({width},)")
    if not np.isfinite(b).all():
        raise ExportError(f"{where}: non-finite bias")
    return b


def build_document(input_dim, weights, biases, activations):
    """Assemble the network document from per-layer arrays.

    activations carries one tag per layer: "relu" or "maxout" for hidden
    layers, optionally followed by a single trailing "linear" readout.
    Maxout layers expect a (rank, width, fan_in) weight stack and a
    (rank, width) bias stack.
    """
    if len(weights) != len(biases) or len(weights) != len(activations):
        raise ExportError(
            f"got {len(weights)} weight arrays, {len(biases)} bias arrays, "
            f"{len(activations)} activation tags"
        )
    input_dim = int(input_dim)
    if input_dim < 1:
        raise ExportError("input_dim must be a positive integer")
    doc = {"input_dim": input_dim, "layers": []}
    fan_in = input_dim
    for idx, (w, b, tag) in enumerate(zip(weights, biases, activations)):
        where = f"layer {idx + 1}"
        if tag not in SUPPORTED_TAGS:
            raise ExportError(f"{where}: unsupported activation tag {tag!r}")
        if tag == "linear":
            if idx != len(weights) - 1:
                raise ExportError(f"{where}: linear readout must be the last entry")
            w = _check_matrix(w, fan_in, where)
            b = _check_vector(b, w.shape[0], where)
            doc["output"] = {"weights": w.tolist(), "bias": b.tolist()}
            continue
        if tag == "relu":
            w = _check_matrix(w, fan_in, where)
            b = _check_vector(b, w.shape[0], where)
            doc["layers"].append(
                {"type": "relu", "weights": w.tolist(), "bias": b.tolist()}
            )
            fan_in = w.shape[0]
        else:
            w = np.asarray(w, dtype=float)
            if w.ndim != 3 or w.shape[0] < 2:
                raise ExportError(
                    f"{where}: maxout weights must be a (rank>=2, width, fan_in) "
                    f"stack, got shape {w.shape}"
                )
            b = np.asarray(b, dtype=float)
            if b.shape != w.shape[:2]:
                raise ExportError(
                    f"{where}: maxout bias stack {b.shape} != (rank, width) "
                    f"{w.shape[:2]}"
                )
            stack = [_check_matrix(wj, fan_in, f"{where} branch {j + 1}")
                     for j, wj in enumerate(w)]
            doc["layers"].append(
                {
                    "type": "maxout",
                    "rank": int(w.shape[0]),
                    "weights": [wj.tolist() for wj in stack],
                    "bias": [bj.tolist() for bj in b],
                }
            )
            fan_in = w.shape[1]
    return doc


def export_model(input_dim, weights, biases, activations, out_path):
    """Write the network JSON; returns the document."""
    doc = build_document(input_dim, weights, biases, activations)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return doc
