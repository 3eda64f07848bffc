import numpy as np
import pytest

from linregions import (
    Box,
    CounterOptions,
    LinearOutput,
    Network,
    ReluLayer,
    count_regions_relu,
)


@pytest.fixture(scope="session", autouse=True)
def warm_lp_kernel():
    """Compile/warm the LP kernel once so timed tests measure the algorithm."""
    net = Network(1, (ReluLayer([[1.0]], [0.0]),))
    count_regions_relu(net, CounterOptions(domain=Box.uniform(-1.0, 1.0, 1)))


@pytest.fixture(scope="session")
def fig2_network():
    """2-2-2-2 rectifier whose partition of the plane has 20 regions."""
    return Network(
        2,
        (
            ReluLayer([[-1.0, 1.0], [1.0, 1.0]], [0.0, -4.0]),
            ReluLayer([[-1.0, -3.0], [-3.0, -1.0]], [4.0, 4.0]),
            ReluLayer([[1.0, 3.0], [3.0, 1.0]], [-4.0, -4.0]),
        ),
    )


@pytest.fixture(scope="session")
def fig3_network():
    """1-2-1 rectifier with a disconnected activation boundary (5 pieces on [-2,2])."""
    return Network(
        1,
        (
            ReluLayer([[1.0], [-1.0]], [0.0, 1.0]),
            ReluLayer([[4.0, 2.0]], [-3.0]),
        ),
    )


@pytest.fixture(scope="session")
def sawtooth4_network():
    """Hand-specified 4-unit single-input layer with signed readout; 5 regions on [0,1]."""
    return Network(
        1,
        (ReluLayer([[-13.5], [9.0], [9.0], [9.0]], [1.5, -3.0, -5.0, 0.0]),),
        LinearOutput([[-1.0, 1.0, -1.0, 1.0]], [5.0]),
    )


def make_random_relu(rng, n0=None, max_neurons=12, max_layers=3, scale=1.5):
    """Small random rectifier network for oracle-equivalence sweeps."""
    if n0 is None:
        n0 = int(rng.integers(1, 4))
    depth = int(rng.integers(1, max_layers + 1))
    widths = []
    budget = max_neurons
    for l in range(depth):
        hi = max(2, budget - (depth - l - 1))
        w = int(rng.integers(1, min(5, hi) + 1))
        widths.append(w)
        budget -= w
    layers = []
    fan = n0
    for w in widths:
        layers.append(
            ReluLayer(scale * rng.normal(size=(w, fan)), scale * rng.normal(size=w))
        )
        fan = w
    return Network(n0, tuple(layers))


def distinct_strict_patterns_1d(network, lo, hi, samples=20001, eps=1e-6):
    """Sweep oracle: distinct activation patterns along [lo, hi].

    Only points whose active preactivations all clear eps are kept, the
    same strictness rule the counters certify with an LP.
    """
    from linregions import forward

    seen = set()
    for x in np.linspace(lo, hi, samples):
        h = np.array([x])
        key = []
        ok = True
        for layer in network.layers:
            pre = layer.weights @ h + layer.bias
            active = pre > 0.0
            if np.any(active & (pre <= eps)):
                ok = False
                break
            key.append(tuple(np.nonzero(active)[0]))
            h = np.maximum(pre, 0.0)
        if ok:
            seen.add(tuple(key))
    return len(seen)
