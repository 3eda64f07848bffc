"""Network model: evaluation, composed maps, rank diagnostics, file format."""

import json

import numpy as np
import pytest

from linregions import (
    ActivationPattern,
    Box,
    LinearOutput,
    MaxoutLayer,
    Network,
    NetworkFormatError,
    ReluLayer,
    compose_region_map,
    forward,
    read_network,
    region_image_dimension,
    validate,
    write_network,
)
from linregions.network import network_from_json, network_to_json

from conftest import make_random_relu


class TestValidate:
    def test_valid_three_layer_net(self, fig2_network):
        assert validate(fig2_network) == []

    def test_shape_mismatch_names_layer(self):
        net = Network(
            2,
            (
                ReluLayer(np.ones((2, 2)), np.zeros(2)),
                ReluLayer(np.ones((3, 5)), np.zeros(3)),
            ),
        )
        problems = validate(net)
        assert len(problems) == 1
        assert "layer 2" in problems[0]

    def test_nonfinite_weight(self):
        net = Network(1, (ReluLayer([[np.inf]], [0.0]),))
        problems = validate(net)
        assert len(problems) == 1
        assert "non-finite" in problems[0]

    def test_zero_layer_network_is_legal(self):
        assert validate(Network(3)) == []


class TestForward:
    def test_reference_point(self, fig2_network):
        out, pattern = forward(fig2_network, np.array([0.0, 0.0]))
        assert pattern.entries == (frozenset(), frozenset({0, 1}), frozenset({0, 1}))
        np.testing.assert_allclose(out, [12.0, 12.0])

    def test_boundary_is_inactive(self):
        net = Network(1, (ReluLayer([[1.0]], [0.0]),))
        _, pattern = forward(net, np.array([0.0]))
        assert pattern.entries == (frozenset(),)

    def test_maxout_tie_goes_to_lowest_index(self):
        net = Network(1, (MaxoutLayer([[[1.0]], [[-1.0]]], [[0.0], [0.0]]),))
        _, pattern = forward(net, np.array([0.0]))
        assert pattern.entries == ((0,),)

    def test_deterministic(self, fig2_network):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(-5, 5, size=2)
            o1, p1 = forward(fig2_network, x)
            o2, p2 = forward(fig2_network, x)
            assert p1 == p2
            np.testing.assert_array_equal(o1, o2)

    def test_dimension_mismatch(self, fig2_network):
        with pytest.raises(ValueError):
            forward(fig2_network, np.zeros(3))

    def test_pattern_consistency_with_composed_map(self):
        """Within a region, the composed affine map reproduces the network."""
        rng = np.random.default_rng(1)
        for _ in range(30):
            net = make_random_relu(rng)
            x = rng.uniform(-3, 3, size=net.input_dim)
            out, pattern = forward(net, x)
            from linregions.network import _hidden_map

            M, o = _hidden_map(net, pattern, len(net.layers))
            np.testing.assert_allclose(M @ x + o, out, atol=1e-9)

    def test_rescaling_preserves_function_and_patterns(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            net = make_random_relu(rng, max_layers=2)
            if len(net.layers) < 2:
                continue
            i = int(rng.integers(0, net.layers[0].width))
            c = float(rng.uniform(0.2, 5.0))
            w1 = np.array(net.layers[0].weights)
            b1 = np.array(net.layers[0].bias)
            w2 = np.array(net.layers[1].weights)
            w1[i] *= c
            b1[i] *= c
            w2[:, i] /= c
            scaled = Network(
                net.input_dim,
                (ReluLayer(w1, b1), ReluLayer(w2, net.layers[1].bias))
                + net.layers[2:],
            )
            for _ in range(10):
                x = rng.uniform(-3, 3, size=net.input_dim)
                o1, p1 = forward(net, x)
                o2, p2 = forward(scaled, x)
                assert p1 == p2
                np.testing.assert_allclose(o1, o2, atol=1e-9)


class TestComposeRegionMap:
    def test_all_inactive_first_layer(self, fig2_network):
        amap = compose_region_map(fig2_network, ActivationPattern((frozenset(),)), 2)
        np.testing.assert_array_equal(amap.matrix, np.zeros((2, 2)))
        np.testing.assert_array_equal(amap.offset, [4.0, 4.0])

    def test_identity_when_all_active(self):
        rng = np.random.default_rng(3)
        w2 = rng.normal(size=(3, 2))
        net = Network(
            2,
            (ReluLayer(np.eye(2), np.zeros(2)), ReluLayer(w2, np.zeros(3))),
        )
        amap = compose_region_map(net, ActivationPattern((frozenset({0, 1}),)), 2)
        np.testing.assert_allclose(amap.matrix, w2)

    def test_base_case(self, fig2_network):
        amap = compose_region_map(fig2_network, ActivationPattern(()), 1)
        np.testing.assert_array_equal(amap.matrix, fig2_network.layers[0].weights)
        np.testing.assert_array_equal(amap.offset, fig2_network.layers[0].bias)

    def test_prefix_length_mismatch(self, fig2_network):
        with pytest.raises(ValueError):
            compose_region_map(fig2_network, ActivationPattern(()), 2)

    def test_maxout_layer_rows_are_neuron_major(self):
        net = Network(
            2,
            (
                ReluLayer(np.eye(2), np.zeros(2)),
                MaxoutLayer(
                    [[[1.0, 0.0], [0.0, 1.0]], [[2.0, 0.0], [0.0, 2.0]]],
                    [[0.5, 0.0], [0.0, -0.5]],
                ),
            ),
        )
        amap = compose_region_map(net, ActivationPattern((frozenset({0, 1}),)), 2)
        # neuron 0 branches 1..2, then neuron 1 branches 1..2
        np.testing.assert_array_equal(
            amap.matrix, [[1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [0.0, 2.0]]
        )
        np.testing.assert_array_equal(amap.offset, [0.5, 0.0, 0.0, -0.5])


class TestRegionImageDimension:
    def test_all_inactive_is_zero(self, fig2_network):
        pattern = ActivationPattern((frozenset(), frozenset(), frozenset()))
        assert region_image_dimension(fig2_network, pattern) == 0

    def test_full_rank_first_layer(self):
        rng = np.random.default_rng(4)
        net = Network(4, (ReluLayer(rng.normal(size=(3, 4)), rng.normal(size=3)),))
        pattern = ActivationPattern((frozenset({0, 1, 2}),))
        assert region_image_dimension(net, pattern) == 3

    def test_narrow_active_set_caps_rank(self, fig2_network):
        pattern = ActivationPattern((frozenset({0}), frozenset({0})))
        assert region_image_dimension(fig2_network, pattern) == 1

    def test_monotone_in_depth_and_active_set(self):
        """dim through layer l never exceeds min(|S^l|, dim through l-1)."""
        rng = np.random.default_rng(5)
        for _ in range(40):
            net = make_random_relu(rng)
            x = rng.uniform(-3, 3, size=net.input_dim)
            _, pattern = forward(net, x)
            prev = net.input_dim
            for l in range(1, len(net.layers) + 1):
                sub = ActivationPattern(pattern.entries[:l])
                dim = region_image_dimension(net, sub)
                assert dim <= min(len(pattern.entries[l - 1]), prev)
                prev = dim


class TestFileFormat:
    def test_round_trip_bit_exact(self, fig2_network, tmp_path):
        rng = np.random.default_rng(6)
        net = Network(
            2,
            (
                ReluLayer(rng.normal(size=(3, 2)), rng.normal(size=3)),
                MaxoutLayer(rng.normal(size=(2, 2, 3)), rng.normal(size=(2, 2))),
            ),
            LinearOutput(rng.normal(size=(1, 2)), rng.normal(size=1)),
        )
        path = tmp_path / "net.json"
        write_network(net, path)
        back = read_network(path)
        assert back.input_dim == net.input_dim
        for a, b in zip(net.layers, back.layers):
            np.testing.assert_array_equal(a.weights, b.weights)
            np.testing.assert_array_equal(a.bias, b.bias)
        np.testing.assert_array_equal(net.output.weights, back.output.weights)
        write_network(fig2_network, path)
        again = read_network(path)
        for a, b in zip(fig2_network.layers, again.layers):
            np.testing.assert_array_equal(a.weights, b.weights)

    def test_missing_bias_names_layer(self):
        doc = {"input_dim": 1, "layers": [{"type": "relu", "weights": [[1.0]]}]}
        with pytest.raises(NetworkFormatError, match=r"layers\[0\]\.bias"):
            network_from_json(doc)

    def test_maxout_rank_one_rejected(self):
        doc = {
            "input_dim": 1,
            "layers": [{"type": "maxout", "rank": 1, "weights": [[[1.0]]], "bias": [[0.0]]}],
        }
        with pytest.raises(NetworkFormatError, match="rank must be >= 2"):
            network_from_json(doc)

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(NetworkFormatError, match="not valid JSON"):
            read_network(path)

    def test_shape_violation_reported_on_load(self):
        doc = {
            "input_dim": 2,
            "layers": [
                {"type": "relu", "weights": [[1.0, 0.0]], "bias": [0.0]},
                {"type": "relu", "weights": [[1.0, 2.0, 3.0]], "bias": [0.0]},
            ],
        }
        with pytest.raises(NetworkFormatError, match="layer 2"):
            network_from_json(doc)

    def test_json_doc_shape(self, fig2_network):
        doc = network_to_json(fig2_network)
        assert json.loads(json.dumps(doc)) == doc
        assert doc["layers"][0]["type"] == "relu"

    def test_pattern_json_round_trip(self, fig2_network):
        _, pattern = forward(fig2_network, np.array([0.0, 0.0]))
        doc = pattern.to_json()
        assert doc == [[], [0, 1], [0, 1]]
        back = ActivationPattern.from_json(doc, fig2_network)
        assert back == pattern
        mixed = Network(
            1,
            (
                ReluLayer([[1.0]], [0.0]),
                MaxoutLayer([[[1.0]], [[-1.0]]], [[0.0], [0.0]]),
            ),
        )
        _, mp = forward(mixed, np.array([2.0]))
        assert ActivationPattern.from_json(mp.to_json(), mixed) == mp


class TestDomains:
    def test_box_validation(self):
        with pytest.raises(ValueError):
            Box([0.0, 0.0], [1.0])
        with pytest.raises(ValueError):
            Box([2.0], [1.0])
        with pytest.raises(ValueError):
            Box([np.nan], [1.0])

    def test_uniform_box(self):
        box = Box.uniform(-1.0, 1.0, 3)
        assert box.dim == 3
        np.testing.assert_array_equal(box.lower, [-1.0, -1.0, -1.0])
