"""Benchmark the LP kernel backends: numba @njit vs pure numpy.

The backend is chosen at import time from LINREGIONS_NUMBA, so each
measurement runs in a fresh subprocess.  Workloads are the counting jobs
that dominate real usage; the JIT warm-up solve is excluded from timing.

    python benchmarks/bench_simplex.py
"""

import json
import os
import subprocess
import sys

WORKER = r"""
import json, time
import numpy as np
from linregions import (
    Box, CounterOptions, Network, ReluLayer, count_regions_relu, multi_dim,
)
from linregions import _backend

# warm up (JIT compile on the numba path)
warm = Network(1, (ReluLayer([[1.0]], [0.0]),))
count_regions_relu(warm, CounterOptions(domain=Box.uniform(-1.0, 1.0, 1)))

results = {"backend": _backend.BACKEND}

fig2 = Network(2, (
    ReluLayer([[-1.0, 1.0], [1.0, 1.0]], [0.0, -4.0]),
    ReluLayer([[-1.0, -3.0], [-3.0, -1.0]], [4.0, 4.0]),
    ReluLayer([[1.0, 3.0], [3.0, 1.0]], [-4.0, -4.0]),
))
t0 = time.perf_counter()
for _ in range(20):
    count_regions_relu(fig2, CounterOptions(domain=Box.uniform(-50.0, 50.0, 2)))
results["fig2_x20"] = time.perf_counter() - t0

net = multi_dim(2, (6, 6), seed=7)
t0 = time.perf_counter()
count_regions_relu(net, CounterOptions(domain=Box.uniform(0.0, 1.0, 2)))
results["multidim_6_6"] = time.perf_counter() - t0

rng = np.random.default_rng(0)
layers = []
fan = 3
for w in (5, 5, 4):
    layers.append(ReluLayer(1.5 * rng.normal(size=(w, fan)), rng.normal(size=w)))
    fan = w
deep = Network(3, tuple(layers))
t0 = time.perf_counter()
count_regions_relu(deep, CounterOptions(domain=Box.uniform(-4.0, 4.0, 3)))
results["random_3_554"] = time.perf_counter() - t0

print(json.dumps(results))
"""


def run(backend_flag):
    env = dict(os.environ, LINREGIONS_NUMBA=backend_flag)
    out = subprocess.run(
        [sys.executable, "-c", WORKER], env=env, capture_output=True, text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    numba = run("1")
    numpy_ = run("0")
    assert numba["backend"] in ("numba", "numpy")
    print(f"{'workload':<16} {'numba (s)':>10} {'numpy (s)':>10} {'speedup':>8}")
    for key in ("fig2_x20", "multidim_6_6", "random_3_554"):
        a, b = numba[key], numpy_[key]
        print(f"{key:<16} {a:>10.3f} {b:>10.3f} {b / a:>7.1f}x")
    if numba["backend"] != "numba":
        print("note: numba not importable; both columns ran the numpy path")


if __name__ == "__main__":
    main()
