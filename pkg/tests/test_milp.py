"""MILP export: structure, naming contract, LP rendering, solver cross-check."""

import os
import re

import numpy as np
import pytest

from linregions import (
    Box,
    MaxoutLayer,
    Network,
    ReluLayer,
    Unrestricted,
    export_milp,
    render_lp,
)


class TestStructure:
    def test_single_neuron_rows(self):
        net = Network(2, (ReluLayer([[1.0, -1.0]], [0.0]),))
        model = export_milp(net, Box.uniform(0.0, 1.0, 2))
        assert [r.name for r in model.rows] == ["map1_1", "act1_1", "ina1_1", "fcut1_1"]
        assert model.binaries == ["z1_1"]
        assert model.bounds["h1_1"] == (0.0, None)
        assert model.bounds["hb1_1"] == (0.0, None)
        assert model.bounds["f"] == (None, None)
        assert model.bounds["x1"] == (0.0, 1.0)
        assert model.bounds["x2"] == (0.0, 1.0)

    def test_reference_network_binaries(self, fig2_network):
        model = export_milp(fig2_network, Box.uniform(-50.0, 50.0, 2))
        assert len(model.binaries) == 6
        assert model.binaries == [f"z{l}_{i}" for l in (1, 2, 3) for i in (1, 2)]
        for l in (1, 2, 3):
            for i in (1, 2):
                for prefix in ("map", "act", "ina", "fcut"):
                    model.row(f"{prefix}{l}_{i}")

    def test_map_row_uses_previous_layer_variables(self, fig2_network):
        model = export_milp(fig2_network, Box.uniform(-50.0, 50.0, 2))
        row = model.row("map2_1")
        assert set(row.coeffs) == {"h1_1", "h1_2", "h2_1", "hb2_1"}
        row1 = model.row("map1_1")
        assert set(row1.coeffs) == {"x1", "x2", "h1_1", "hb1_1"}

    def test_maxout_rows(self):
        net = Network(1, (MaxoutLayer([[[1.0]], [[-1.0]]], [[0.0], [0.0]]),))
        model = export_milp(net, Box.uniform(-1.0, 1.0, 1))
        sel = model.row("sel1_1")
        assert sel.sense == "="
        assert sel.rhs == 1.0
        assert set(sel.coeffs) == {"z1_1_1", "z1_1_2"}
        assert all(v == 1.0 for v in sel.coeffs.values())
        for j in (1, 2):
            model.row(f"map1_1_{j}")
            model.row(f"act1_1_{j}")
            model.row(f"ina1_1_{j}")
        assert model.bounds["g1_1_1"] == (None, None)
        assert model.bounds["h1_1"] == (None, None)

    def test_unrestricted_rejected(self, fig2_network):
        with pytest.raises(ValueError):
            export_milp(fig2_network, Unrestricted())


class TestRendering:
    def test_sections_in_order(self, fig2_network):
        text = render_lp(export_milp(fig2_network, Box.uniform(0.0, 1.0, 2)))
        positions = [text.index(s) for s in ("Maximize", "Subject To", "Bounds", "Binaries", "End")]
        assert positions == sorted(positions)
        assert " obj: f" in text

    def test_variable_name_grammar(self, fig2_network):
        text = render_lp(export_milp(fig2_network, Box.uniform(0.0, 1.0, 2)))
        names = set(re.findall(r"\b(?:x\d+|hb?\d+_\d+|z\d+_\d+(?:_\d+)?|g\d+_\d+_\d+|f)\b", text))
        assert {"x1", "x2", "h1_1", "hb3_2", "z2_1", "f"} <= names

    def test_deterministic_bytes(self, fig2_network):
        box = Box.uniform(-50.0, 50.0, 2)
        a = render_lp(export_milp(fig2_network, box))
        b = render_lp(export_milp(fig2_network, box))
        assert a == b


def solve_pool_with_highs(model, f_floor=1e-7, limit=500):
    """Enumerate distinct binary assignments with optimal f above the floor,
    adding a no-good cut after each solution (solution-pool emulation)."""
    from scipy.optimize import Bounds as ScipyBounds
    from scipy.optimize import LinearConstraint
    from scipy.optimize import milp as scipy_milp

    names = sorted(model.variable_names())
    idx = {n: i for i, n in enumerate(names)}
    nv = len(names)
    a_eq, b_eq, a_ub, b_ub = [], [], [], []
    for row in model.rows:
        a = np.zeros(nv)
        for name, val in row.coeffs.items():
            a[idx[name]] = val
        (a_eq if row.sense == "=" else a_ub).append(a)
        (b_eq if row.sense == "=" else b_ub).append(row.rhs)
    lb = np.full(nv, -np.inf)
    ub = np.full(nv, np.inf)
    for name, (lo, hi) in model.bounds.items():
        if lo is not None:
            lb[idx[name]] = lo
        if hi is not None:
            ub[idx[name]] = hi
    integrality = np.zeros(nv)
    for name in model.binaries:
        integrality[idx[name]] = 1
        lb[idx[name]], ub[idx[name]] = 0, 1
    c = np.zeros(nv)
    c[idx["f"]] = -1.0

    cuts, cut_rhs = [], []
    solutions = []
    for _ in range(limit):
        cons = [LinearConstraint(np.array(a_eq), np.array(b_eq), np.array(b_eq))]
        rows = a_ub + cuts
        rhs = b_ub + cut_rhs
        cons.append(LinearConstraint(np.array(rows), -np.inf, np.array(rhs)))
        res = scipy_milp(
            c, constraints=cons, bounds=ScipyBounds(lb, ub), integrality=integrality
        )
        if not res.success or -res.fun <= f_floor:
            break
        zvec = tuple(int(round(res.x[idx[n]])) for n in model.binaries)
        solutions.append((zvec, -res.fun))
        cut = np.zeros(nv)
        for name, v in zip(model.binaries, zvec):
            cut[idx[name]] = 1.0 if v == 1 else -1.0
        cuts.append(cut)
        cut_rhs.append(float(sum(zvec)) - 1.0)
    return solutions


class TestSolverCrossCheck:
    def test_single_neuron_pool(self):
        net = Network(2, (ReluLayer([[1.0, -1.0]], [0.0]),))
        model = export_milp(net, Box.uniform(0.0, 1.0, 2))
        assert len(solve_pool_with_highs(model)) == 2

    @pytest.mark.skipif(
        os.environ.get("LINREGIONS_MILP_CROSSCHECK", "1") == "0",
        reason="external-solver cross-check disabled",
    )
    def test_reference_network_pool_counts_20(self, fig2_network):
        model = export_milp(fig2_network, Box.uniform(-50.0, 50.0, 2))
        solutions = solve_pool_with_highs(model)
        assert len(solutions) == 20
