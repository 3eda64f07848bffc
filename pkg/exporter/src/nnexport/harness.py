"""Experiment harness: train seeded models, export them, emit the metrics CSV.

The counting tool is only ever reached through its command line and the
network JSON files; nothing here imports it.
"""

from __future__ import annotations

import csv
import json
import os
import shutil
import subprocess
import sys

from .export import export_model
from .train import train_small

CSV_COLUMNS = ["config", "seed", "regions", "ce", "mr", "model_path"]


def counting_command():
    """Argv prefix for the counting CLI.

    NNEXPORT_LINREGIONS overrides; otherwise use the console script when
    present and fall back to `python -m linregions`.
    """
    override = os.environ.get("NNEXPORT_LINREGIONS")
    if override:
        return override.split()
    exe = shutil.which("linregions")
    if exe:
        return [exe]
    return [sys.executable, "-m", "linregions"]


def count_regions_via_cli(model_path, box=(0.0, 1.0), timeout=600):
    """Exact region count of an exported model, through the external CLI."""
    cmd = counting_command() + [
        "count", str(model_path), "--box", f"{box[0]},{box[1]}", "--json",
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout)
    if proc.returncode != 0:
        raise RuntimeError(
            f"counting CLI failed ({proc.returncode}): {proc.stderr.strip()}"
        )
    return int(json.loads(proc.stdout)["count"])


def bound_via_cli(n0, widths, timeout=120):
    """Layered upper bound for a configuration, through the external CLI."""
    cmd = counting_command() + [
        "bounds", "--n0", str(n0), "--widths", ",".join(str(w) for w in widths),
        "--json",
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout)
    if proc.returncode != 0:
        raise RuntimeError(f"bounds CLI failed: {proc.stderr.strip()}")
    return int(json.loads(proc.stdout)["bounds"]["relu_upper_thm1"])


def export_trained(model, out_path):
    return export_model(
        input_dim=model.weights[0].shape[1],
        weights=model.weights,
        biases=model.biases,
        activations=model.activations,
        out_path=out_path,
    )


def run_experiment(widths, seeds, out_dir, epochs=20, count=False):
    """Train one configuration across seeds; write models and the CSV.

    Returns the CSV rows. The `regions` column stays empty unless count is
    requested (counting 64-input models takes a second or two each).
    """
    os.makedirs(out_dir, exist_ok=True)
    config = "-".join(str(w) for w in widths)
    rows = []
    for seed in seeds:
        model = train_small(widths, seed=seed, epochs=epochs)
        model_path = os.path.join(out_dir, f"digits_{config}_seed{seed}.json")
        export_trained(model, model_path)
        regions = count_regions_via_cli(model_path) if count else ""
        rows.append(
            {
                "config": config,
                "seed": seed,
                "regions": regions,
                "ce": f"{model.train_cross_entropy:.6f}",
                "mr": f"{model.test_error_rate:.6f}",
                "model_path": model_path,
            }
        )
    csv_path = os.path.join(out_dir, f"experiment_{config}.csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return rows, csv_path
