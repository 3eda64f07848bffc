"""Exact region enumeration by branch-and-prune over activation patterns.

The search walks neurons in layer-major order; each node carries the
pattern prefix as accumulated input-space constraint rows.  A node is
pruned when the closed (non-strict) system is empty; a full pattern is
counted when the maximized minimum active margin clears the strict
threshold, which is what makes boundary-degenerate patterns count zero
times instead of twice.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .feasibility import (
    DEFAULT_TOL,
    FeasibilityQuery,
    exact_max_margin,
    feasible_nonstrict,
    max_margin,
)
from .network import (
    ActivationPattern,
    Box,
    ReluLayer,
    region_image_dimension,
    validate,
)

DEFAULT_EPSILON = 1e-6
DEFAULT_REGION_CAP = 100_000_000


class RegionCapExceeded(RuntimeError):
    """Raised when the configured region cap is hit; carries the partial result."""

    def __init__(self, result):
        super().__init__(f"region cap exceeded at count {result.count}")
        self.result = result


class GuardExceeded(RuntimeError):
    """Raised when a brute-force or grid size guard would be violated."""


class CertificationError(RuntimeError):
    """Raised when the exact-rational recheck contradicts a float verdict."""


@dataclass(frozen=True)
class CounterOptions:
    domain: object
    epsilon: float = DEFAULT_EPSILON
    region_cap: int | None = DEFAULT_REGION_CAP
    collect_witnesses: bool = False
    workers: int = 1
    lp_tol: float = DEFAULT_TOL
    certify_every: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class RegionWitness:
    pattern: ActivationPattern
    point: np.ndarray
    margin: float  # inf when the margin is unbounded


@dataclass
class CountResult:
    count: int
    nodes: int = 0
    pruned: int = 0
    seconds: float = 0.0
    witnesses: list | None = None
    capped: bool = False

    def to_json(self):
        doc = {
            "count": self.count,
            "nodes": self.nodes,
            "pruned": self.pruned,
            "seconds": self.seconds,
        }
        if self.witnesses is not None:
            doc["witnesses"] = [
                {
                    "pattern": w.pattern.to_json(),
                    "point": list(w.point),
                    "margin": None if math.isinf(w.margin) else w.margin,
                }
                for w in self.witnesses
            ]
        if self.capped:
            doc["capped"] = True
        return doc


def _layer_branches(layer, M, o):
    """Constraint rows for each neuron decision of `layer` inside prefix map (M, o).

    For a ReLU neuron the choices are (active, inactive); row (a, b) means
    the preactivation a.x + b.  For a maxout neuron choice j, the rows are
    the k-1 dominance differences of branch j over every other branch.
    """
    if isinstance(layer, ReluLayer):
        A = layer.weights @ M
        cvec = layer.weights @ o + layer.bias
        return "relu", A, cvec
    k = layer.rank
    A = np.einsum("kij,jd->kid", layer.weights, M)
    cvec = layer.weights @ o + layer.bias  # (k, width)
    return "maxout", A, cvec


def _apply_layer_pattern(layer, entry, M, o):
    """Map (M, o) for h^{l-1} through layer l fixed to pattern entry."""
    if isinstance(layer, ReluLayer):
        A = layer.weights @ M
        cvec = layer.weights @ o + layer.bias
        keep = np.zeros(layer.width, dtype=bool)
        if entry:
            keep[list(entry)] = True
        A[~keep] = 0.0
        cvec[~keep] = 0.0
        return A, cvec
    winners = np.asarray(entry, dtype=int)
    rows = layer.weights[winners, np.arange(layer.width)]
    bsel = layer.bias[winners, np.arange(layer.width)]
    return rows @ M, rows @ o + bsel


class _TreeSearch:
    """Depth-first enumeration with non-strict LP pruning and strict leaves."""

    def __init__(self, network, options):
        self.net = network
        self.opts = options
        self.n0 = network.input_dim
        self.margin_lhs = []
        self.margin_rhs = []
        self.hard_lhs = []
        self.hard_rhs = []
        self.result = CountResult(
            count=0, witnesses=[] if options.collect_witnesses else None
        )
        self.entries = []

    def _query(self):
        n0 = self.n0
        return FeasibilityQuery(
            n0,
            np.array(self.hard_lhs, dtype=float).reshape(-1, n0),
            np.array(self.hard_rhs, dtype=float),
            np.array(self.margin_lhs, dtype=float).reshape(-1, n0),
            np.array(self.margin_rhs, dtype=float),
            self.opts.domain,
        )

    def _leaf(self):
        res = self.result
        res.nodes += 1
        verdict = max_margin(self._query(), self.opts.lp_tol)
        if not verdict.strictly_feasible(self.opts.epsilon):
            res.pruned += 1
            return
        if self.opts.region_cap is not None and res.count >= self.opts.region_cap:
            res.capped = True
            raise RegionCapExceeded(res)
        res.count += 1
        if self.opts.certify_every and res.count % self.opts.certify_every == 0:
            exact = exact_max_margin(self._query())
            if not exact.strictly_feasible(self.opts.epsilon):
                raise CertificationError(
                    f"exact recheck rejects counted pattern {self.entries!r}"
                )
        if res.witnesses is not None:
            pattern = ActivationPattern(tuple(self.entries))
            margin = math.inf if verdict.is_unbounded else verdict.margin
            res.witnesses.append(RegionWitness(pattern, verdict.witness.copy(), margin))

    def _push_relu(self, a, b, active):
        if active:
            self.margin_lhs.append(a)
            self.margin_rhs.append(-b)
        else:
            self.hard_lhs.append(a)
            self.hard_rhs.append(-b)

    def _pop_relu(self, active):
        if active:
            self.margin_lhs.pop()
            self.margin_rhs.pop()
        else:
            self.hard_lhs.pop()
            self.hard_rhs.pop()

    def run(self, start_entries=None, start_maps=None):
        t0 = time.perf_counter()
        if start_entries is None:
            M = np.eye(self.n0)
            o = np.zeros(self.n0)
            self._layer(0, M, o)
        else:
            self._resume(start_entries, start_maps)
        self.result.seconds = time.perf_counter() - t0
        return self.result

    def _resume(self, entries, maps):
        M, o = maps
        self._layer(len(entries), M, o)

    def _layer(self, l, M, o):
        if l == len(self.net.layers):
            self._leaf()
            return
        layer = self.net.layers[l]
        kind, A, cvec = _layer_branches(layer, M, o)
        if kind == "relu":
            self.entries.append(set())
            self._relu_neuron(l, layer, A, cvec, 0, M, o)
            self.entries.pop()
        else:
            self.entries.append([])
            self._maxout_neuron(l, layer, A, cvec, 0, M, o)
            self.entries.pop()

    def _descend(self, l, layer, next_neuron, A, cvec, M, o, advance):
        if next_neuron < layer.width:
            advance(l, layer, A, cvec, next_neuron, M, o)
            return
        entry = self.entries[-1]
        if isinstance(layer, ReluLayer):
            self.entries[-1] = frozenset(entry)
        else:
            self.entries[-1] = tuple(entry)
        M2, o2 = _apply_layer_pattern(layer, self.entries[-1], M.copy(), o.copy())
        self._layer(l + 1, M2, o2)
        self.entries[-1] = entry

    def _relu_neuron(self, l, layer, A, cvec, i, M, o):
        a, b = A[i], cvec[i]
        is_leaf_level = l == len(self.net.layers) - 1 and i == layer.width - 1
        alive = 0
        for active in (True, False):
            self._push_relu(a, b, active)
            last_chance = not active and alive == 0
            if is_leaf_level:
                keep = True  # the leaf runs its own strict LP
            elif last_chance:
                keep = True  # siblings cover the parent region
            else:
                self.result.nodes += 1
                keep = feasible_nonstrict(self._query(), self.opts.lp_tol)
                if not keep:
                    self.result.pruned += 1
            if keep:
                alive += 1
                if active:
                    self.entries[-1].add(i)
                self._descend(l, layer, i + 1, A, cvec, M, o, self._relu_neuron)
                if active:
                    self.entries[-1].discard(i)
            self._pop_relu(active)

    def _maxout_neuron(self, l, layer, A, cvec, i, M, o):
        k = layer.rank
        is_leaf_level = l == len(self.net.layers) - 1 and i == layer.width - 1
        alive = 0
        for j in range(k):
            rows = []
            rhs = []
            for jp in range(k):
                if jp == j:
                    continue
                rows.append(A[j, i] - A[jp, i])
                rhs.append(-(cvec[j, i] - cvec[jp, i]))
            self.margin_lhs.extend(rows)
            self.margin_rhs.extend(rhs)
            last_chance = j == k - 1 and alive == 0
            if is_leaf_level or last_chance:
                keep = True
            else:
                self.result.nodes += 1
                keep = feasible_nonstrict(self._query(), self.opts.lp_tol)
                if not keep:
                    self.result.pruned += 1
            if keep:
                alive += 1
                self.entries[-1].append(j)
                self._descend(l, layer, i + 1, A, cvec, M, o, self._maxout_neuron)
                self.entries[-1].pop()
            del self.margin_lhs[-len(rows):]
            del self.margin_rhs[-len(rhs):]


def _check_domain(network, domain):
    if isinstance(domain, Box) and domain.dim != network.input_dim:
        raise ValueError(
            f"box dimension {domain.dim} != network input dimension {network.input_dim}"
        )


def _require_valid(network):
    problems = validate(network)
    if problems:
        raise ValueError("invalid network: " + "; ".join(problems))


def _prefix_jobs(network, options, depth):
    """Feasible pattern prefixes covering `depth` whole layers, with maps."""
    search = _TreeSearch(network, options)
    jobs = []

    original_layer = search._layer

    def capture(l, M, o):
        if l == depth:
            jobs.append((
                [e for e in search.entries],
                (M.copy(), o.copy()),
                [np.array(r) for r in search.margin_lhs],
                list(search.margin_rhs),
                [np.array(r) for r in search.hard_lhs],
                list(search.hard_rhs),
            ))
            return
        original_layer(l, M, o)

    search._layer = capture
    search.run()
    return jobs, search.result


def _run_prefix_job(args):
    network, options, job = args
    entries, maps, ml, mr, hl, hr = job
    search = _TreeSearch(network, options)
    search.entries = list(entries)
    search.margin_lhs = ml
    search.margin_rhs = mr
    search.hard_lhs = hl
    search.hard_rhs = hr
    try:
        search.run(start_entries=entries, start_maps=maps)
    except RegionCapExceeded as exc:
        return exc.result
    return search.result


def _count_parallel(network, options):
    t0 = time.perf_counter()
    depth = 1
    while depth < len(network.layers) and 2 ** sum(
        layer.width for layer in network.layers[:depth]
    ) < 4 * options.workers:
        depth += 1
    jobs, prefix_stats = _prefix_jobs(network, options, depth)
    total = CountResult(count=0, witnesses=[] if options.collect_witnesses else None)
    total.nodes = prefix_stats.nodes
    total.pruned = prefix_stats.pruned
    with ProcessPoolExecutor(max_workers=options.workers) as pool:
        results = list(
            pool.map(_run_prefix_job, [(network, options, job) for job in jobs])
        )
    capped = False
    for res in results:
        total.count += res.count
        total.nodes += res.nodes
        total.pruned += res.pruned
        capped = capped or res.capped
        if total.witnesses is not None:
            total.witnesses.extend(res.witnesses)
    total.seconds = time.perf_counter() - t0
    if capped or (
        options.region_cap is not None and total.count > options.region_cap
    ):
        total.capped = True
        raise RegionCapExceeded(total)
    return total


def count_regions(network, options):
    """Count the regions of any ReLU/maxout network (dispatch helper)."""
    _require_valid(network)
    _check_domain(network, options.domain)
    if not network.layers:
        res = CountResult(count=1, witnesses=[] if options.collect_witnesses else None)
        if options.collect_witnesses:
            point = _domain_point(network.input_dim, options.domain)
            res.witnesses.append(
                RegionWitness(ActivationPattern(()), point, math.inf)
            )
        return res
    if options.workers > 1:
        return _count_parallel(network, options)
    return _TreeSearch(network, options).run()


def count_regions_relu(network, options):
    """Exact count for rectifier networks; rejects maxout layers."""
    if not network.is_relu:
        raise ValueError("network has maxout layers; use count_regions_maxout")
    return count_regions(network, options)


def count_regions_maxout(network, options):
    """Exact count for networks containing maxout layers (ReLU layers allowed)."""
    return count_regions(network, options)


def _domain_point(dim, domain):
    if isinstance(domain, Box):
        return (domain.lower + domain.upper) / 2.0
    return np.zeros(dim)


def brute_force_count(network, options):
    """Exhaustive oracle: one strict-margin LP per full activation pattern.

    Guards: at most 2^20 ReLU patterns / 10^6 maxout patterns.
    """
    _require_valid(network)
    _check_domain(network, options.domain)
    if not network.layers:
        return count_regions(network, options)
    total_patterns = 1
    for layer in network.layers:
        per = 2 if isinstance(layer, ReluLayer) else layer.rank
        total_patterns *= per ** layer.width
    if network.is_relu:
        if network.num_neurons > 20:
            raise GuardExceeded("brute force limited to 20 ReLU neurons")
    elif total_patterns > 10 ** 6:
        raise GuardExceeded("brute force limited to 10^6 maxout patterns")

    t0 = time.perf_counter()
    res = CountResult(count=0, witnesses=[] if options.collect_witnesses else None)

    def patterns(l):
        if l == len(network.layers):
            yield ()
            return
        layer = network.layers[l]
        if isinstance(layer, ReluLayer):
            options_l = [
                frozenset(i for i in range(layer.width) if mask >> i & 1)
                for mask in range(2 ** layer.width)
            ]
        else:
            options_l = list(itertools.product(range(layer.rank), repeat=layer.width))
        for rest in patterns(l + 1):
            for entry in options_l:
                yield (entry,) + rest

    n0 = network.input_dim
    for entries in patterns(0):
        res.nodes += 1
        margin_lhs, margin_rhs, hard_lhs, hard_rhs = [], [], [], []
        M = np.eye(n0)
        o = np.zeros(n0)
        for layer, entry in zip(network.layers, entries):
            kind, A, cvec = _layer_branches(layer, M, o)
            if kind == "relu":
                for i in range(layer.width):
                    if i in entry:
                        margin_lhs.append(A[i])
                        margin_rhs.append(-cvec[i])
                    else:
                        hard_lhs.append(A[i])
                        hard_rhs.append(-cvec[i])
            else:
                for i, j in enumerate(entry):
                    for jp in range(layer.rank):
                        if jp != j:
                            margin_lhs.append(A[j, i] - A[jp, i])
                            margin_rhs.append(-(cvec[j, i] - cvec[jp, i]))
            M, o = _apply_layer_pattern(layer, entry, M, o)
        query = FeasibilityQuery(
            n0,
            np.array(hard_lhs, dtype=float).reshape(-1, n0),
            np.array(hard_rhs, dtype=float),
            np.array(margin_lhs, dtype=float).reshape(-1, n0),
            np.array(margin_rhs, dtype=float),
            options.domain,
        )
        verdict = max_margin(query, options.lp_tol)
        if verdict.strictly_feasible(options.epsilon):
            res.count += 1
            if res.witnesses is not None:
                margin = math.inf if verdict.is_unbounded else verdict.margin
                res.witnesses.append(
                    RegionWitness(
                        ActivationPattern(entries), verdict.witness.copy(), margin
                    )
                )
        else:
            res.pruned += 1
    res.seconds = time.perf_counter() - t0
    return res


def grid_sample_count(network, domain, resolution, epsilon=DEFAULT_EPSILON):
    """Distinct strict activation patterns over a regular grid.

    A certified lower bound on the exact count: grid points whose minimum
    active margin is at or below epsilon are skipped, so every counted
    pattern is also counted by the exact enumerators.
    """
    _require_valid(network)
    if not isinstance(domain, Box):
        raise ValueError("grid sampling needs a Box domain")
    _check_domain(network, domain)
    resolution = int(resolution)
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    n0 = network.input_dim
    if resolution ** n0 > 2 ** 24:
        raise GuardExceeded(f"grid of {resolution}^{n0} points exceeds the guard")
    axes = [
        np.linspace(domain.lower[d], domain.upper[d], resolution)
        if resolution > 1
        else np.array([(domain.lower[d] + domain.upper[d]) / 2.0])
        for d in range(n0)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)  # (P, n0)

    h = pts.T  # (n0, P)
    keys = []
    ok = np.ones(pts.shape[0], dtype=bool)
    for layer in network.layers:
        if isinstance(layer, ReluLayer):
            pre = layer.weights @ h + layer.bias[:, None]
            active = pre > 0.0
            ok &= ~np.any(active & (pre <= epsilon), axis=0)
            keys.append(np.packbits(active, axis=0))
            h = np.maximum(pre, 0.0)
        else:
            g = np.einsum("kij,jp->kip", layer.weights, h) + layer.bias[:, :, None]
            winners = np.argmax(g, axis=0)  # (width, P)
            best = np.take_along_axis(g, winners[None], axis=0)[0]
            margin = np.full(best.shape, np.inf)
            for j in range(layer.rank):
                diff = best - g[j]
                diff[winners == j] = np.inf
                margin = np.minimum(margin, diff)
            ok &= ~np.any(margin <= epsilon, axis=0)
            keys.append(winners.astype(np.uint8))
            h = best
    if not keys:
        return 1
    stacked = np.vstack(keys).T[ok]
    if stacked.shape[0] == 0:
        return 0
    return int(np.unique(stacked, axis=0).shape[0])


def dimension_profile(count_result, network):
    """Histogram of region image dimensions over collected witnesses."""
    if not network.layers:
        return {network.input_dim: 1}
    if count_result.witnesses is None:
        raise ValueError("witnesses were not collected")
    hist = {}
    for w in count_result.witnesses:
        dim = region_image_dimension(network, w.pattern)
        hist[dim] = hist.get(dim, 0) + 1
    return hist
