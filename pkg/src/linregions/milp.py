"""Mixed-integer formulation of region counting, big-M bounds, LP-format export.

The model's feasible assignments of binaries with margin f > 0 are in
bijection with the counted regions, so an external solver with solution
pool enumeration cross-checks the tree counter.  Per-neuron big-M pairs
come from interval propagation of the box through the layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import Box, MaxoutLayer, ReluLayer, validate

F_ROW_INFLATION = 1e-6


@dataclass(frozen=True)
class BigM:
    """Certified per-neuron output bounds: 0 <= h <= high, 0 <= hbar <= high_bar."""

    high: tuple  # one array per layer, shape (width,)
    high_bar: tuple


@dataclass(frozen=True)
class LinearRow:
    name: str
    coeffs: dict  # variable name -> coefficient
    sense: str  # "<=" or "="
    rhs: float


@dataclass
class MilpModel:
    objective: str
    rows: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)  # name -> (lb or None, ub or None)
    binaries: list = field(default_factory=list)
    big_m: BigM | None = None

    def row(self, name):
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def variable_names(self):
        names = {self.objective}
        for r in self.rows:
            names.update(r.coeffs)
        names.update(self.bounds)
        names.update(self.binaries)
        return names


def _interval_bounds(network, domain):
    """Componentwise output ranges per layer, plus per-branch ranges for maxout.

    Returns a list with one dict per layer: relu layers carry pre/post
    ranges, maxout layers additionally the per-branch preactivation
    ranges.  Matches the nonnegative-output recursion on pure ReLU stacks.
    """
    lo = np.asarray(domain.lower, dtype=float)
    hi = np.asarray(domain.upper, dtype=float)
    out = []
    for layer in network.layers:
        if isinstance(layer, ReluLayer):
            w, b = layer.weights, layer.bias
            pre_hi = np.where(w > 0, w * hi, w * lo).sum(axis=1) + b
            pre_lo = np.where(w > 0, w * lo, w * hi).sum(axis=1) + b
            post_hi = np.maximum(pre_hi, 0.0)
            post_lo = np.zeros_like(post_hi)
            out.append(
                {"pre_lo": pre_lo, "pre_hi": pre_hi, "lo": post_lo, "hi": post_hi}
            )
        else:
            w, b = layer.weights, layer.bias  # (k, width, fan_in), (k, width)
            g_hi = np.where(w > 0, w * hi, w * lo).sum(axis=2) + b
            g_lo = np.where(w > 0, w * lo, w * hi).sum(axis=2) + b
            post_hi = g_hi.max(axis=0)
            post_lo = g_lo.max(axis=0)
            out.append({"g_lo": g_lo, "g_hi": g_hi, "lo": post_lo, "hi": post_hi})
        lo, hi = out[-1]["lo"], out[-1]["hi"]
    return out


def compute_bigM(network, domain):
    """Per-neuron (H, Hbar) bounds: 0 <= h <= H and 0 <= hbar <= Hbar on the box.

    Layer 1 uses interval arithmetic over the (possibly negative) box;
    deeper ReLU layers reduce to the nonnegative-output recursion since
    hidden outputs are bounded below by zero.
    """
    problems = validate(network)
    if problems:
        raise ValueError("invalid network: " + "; ".join(problems))
    if not isinstance(domain, Box):
        raise ValueError("big-M bounds need a Box domain")
    if domain.dim != network.input_dim:
        raise ValueError("box dimension does not match the network input")
    ranges = _interval_bounds(network, domain)
    high = []
    high_bar = []
    for layer, rng in zip(network.layers, ranges):
        if isinstance(layer, ReluLayer):
            high.append(np.maximum(rng["pre_hi"], 0.0))
            high_bar.append(np.maximum(-rng["pre_lo"], 0.0))
        else:
            hb = np.maximum(-rng["lo"], 0.0)
            high.append(np.maximum(rng["hi"], 0.0))
            high_bar.append(hb)
    return BigM(tuple(high), tuple(high_bar))


def _add(coeffs, name, value):
    if value != 0.0:
        coeffs[name] = coeffs.get(name, 0.0) + float(value)


def export_milp(network, domain):
    """Build the counting model: max f over the indicator formulation.

    Variable naming: x<i>, h<l>_<i>, hb<l>_<i>, z<l>_<i>, g<l>_<i>_<j>, f
    (indices 1-based).  Constraint naming: map/act/ina/fcut/sel as listed
    in the module docstring of the LP writer.
    """
    problems = validate(network)
    if problems:
        raise ValueError("invalid network: " + "; ".join(problems))
    if not isinstance(domain, Box):
        raise ValueError("MILP export needs a Box domain")
    if domain.dim != network.input_dim:
        raise ValueError("box dimension does not match the network input")

    big = compute_bigM(network, domain)
    ranges = _interval_bounds(network, domain)
    model = MilpModel(objective="f")
    model.big_m = big
    model.bounds["f"] = (None, None)
    for d in range(network.input_dim):
        model.bounds[f"x{d + 1}"] = (float(domain.lower[d]), float(domain.upper[d]))

    # the bound on f itself, used to deactivate f-rows of inactive neurons
    f_cap = 0.0
    for l, layer in enumerate(network.layers):
        if isinstance(layer, ReluLayer):
            f_cap = max(f_cap, float(big.high[l].max()))
        else:
            rng = ranges[l]
            f_cap = max(f_cap, float((rng["g_hi"].max(axis=0) - rng["g_lo"].min(axis=0)).max()))

    def prev_names(l):
        if l == 0:
            return [f"x{d + 1}" for d in range(network.input_dim)]
        return [f"h{l}_{i + 1}" for i in range(network.layers[l - 1].width)]

    for l, layer in enumerate(network.layers, start=1):
        prev = prev_names(l - 1)
        if isinstance(layer, ReluLayer):
            H = big.high[l - 1]
            Hb = big.high_bar[l - 1]
            for i in range(layer.width):
                h = f"h{l}_{i + 1}"
                hb = f"hb{l}_{i + 1}"
                z = f"z{l}_{i + 1}"
                model.bounds[h] = (0.0, None)
                model.bounds[hb] = (0.0, None)
                model.binaries.append(z)
                coeffs = {}
                for j, name in enumerate(prev):
                    _add(coeffs, name, layer.weights[i, j])
                _add(coeffs, h, -1.0)
                _add(coeffs, hb, 1.0)
                model.rows.append(
                    LinearRow(f"map{l}_{i + 1}", coeffs, "=", -float(layer.bias[i]))
                )
                model.rows.append(
                    LinearRow(f"act{l}_{i + 1}", {h: 1.0, z: -float(H[i])}, "<=", 0.0)
                )
                model.rows.append(
                    LinearRow(
                        f"ina{l}_{i + 1}", {hb: 1.0, z: float(Hb[i])}, "<=", float(Hb[i])
                    )
                )
                # f <= h + (1 - z) * M with M slightly above the h bound so a
                # never-active neuron cannot force f to zero
                m_f = max(float(H[i]), f_cap) + F_ROW_INFLATION * max(1.0, f_cap)
                model.rows.append(
                    LinearRow(
                        f"fcut{l}_{i + 1}",
                        {"f": 1.0, h: -1.0, z: m_f},
                        "<=",
                        m_f,
                    )
                )
        else:
            rng = ranges[l - 1]
            k = layer.rank
            for i in range(layer.width):
                h = f"h{l}_{i + 1}"
                model.bounds[h] = (None, None)
                sel = {}
                for j in range(k):
                    g = f"g{l}_{i + 1}_{j + 1}"
                    z = f"z{l}_{i + 1}_{j + 1}"
                    model.bounds[g] = (None, None)
                    model.binaries.append(z)
                    sel[z] = 1.0
                    coeffs = {}
                    for jj, name in enumerate(prev):
                        _add(coeffs, name, layer.weights[j, i, jj])
                    _add(coeffs, g, -1.0)
                    model.rows.append(
                        LinearRow(
                            f"map{l}_{i + 1}_{j + 1}",
                            coeffs,
                            "=",
                            -float(layer.bias[j, i]),
                        )
                    )
                    model.rows.append(
                        LinearRow(
                            f"act{l}_{i + 1}_{j + 1}", {h: -1.0, g: 1.0}, "<=", 0.0
                        )
                    )
                    m_sel = max(0.0, float(rng["hi"][i] - rng["g_lo"][j, i]))
                    model.rows.append(
                        LinearRow(
                            f"ina{l}_{i + 1}_{j + 1}",
                            {h: 1.0, g: -1.0, z: m_sel},
                            "<=",
                            m_sel,
                        )
                    )
                    for jp in range(k):
                        if jp == j:
                            continue
                        gp = f"g{l}_{i + 1}_{jp + 1}"
                        m_f = f_cap + max(
                            0.0, float(rng["g_hi"][jp, i] - rng["lo"][i])
                        ) + F_ROW_INFLATION * max(1.0, f_cap)
                        model.rows.append(
                            LinearRow(
                                f"fcut{l}_{i + 1}_{j + 1}_{jp + 1}",
                                {"f": 1.0, h: -1.0, gp: 1.0, z: m_f},
                                "<=",
                                m_f,
                            )
                        )
                model.rows.append(LinearRow(f"sel{l}_{i + 1}", sel, "=", 1.0))
    return model


def _fmt(x):
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _terms(coeffs):
    parts = []
    for name, value in coeffs.items():
        if value >= 0:
            parts.append(f"+ {_fmt(value)} {name}")
        else:
            parts.append(f"- {_fmt(-value)} {name}")
    return " ".join(parts)


def render_lp(model):
    """Serialize the model in LP file format (Maximize / Subject To / Bounds / Binaries)."""
    lines = ["Maximize", f" obj: {model.objective}", "Subject To"]
    for row in model.rows:
        sense = row.sense if row.sense == "=" else "<="
        lines.append(f" {row.name}: {_terms(row.coeffs)} {sense} {_fmt(row.rhs)}")
    lines.append("Bounds")
    for name, (lb, ub) in model.bounds.items():
        if lb is None and ub is None:
            lines.append(f" {name} free")
        elif lb is not None and ub is not None:
            lines.append(f" {_fmt(lb)} <= {name} <= {_fmt(ub)}")
        elif lb is not None:
            lines.append(f" {name} >= {_fmt(lb)}")
        else:
            lines.append(f" {name} <= {_fmt(ub)}")
    lines.append("Binaries")
    for name in model.binaries:
        lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_milp(network, domain, path):
    model = export_milp(network, domain)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_lp(model))
    return model
