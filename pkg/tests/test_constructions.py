"""Extremal constructions: zigzag solve, deep stacks, replicated multi-dim nets."""

import numpy as np
import pytest

from linregions import (
    Box,
    CounterOptions,
    NetConfig,
    count_regions_relu,
    deep_1d,
    dimension_profile,
    multi_dim,
    thm3_lower,
    zaslavsky,
    zigzag_layer,
)
from linregions.constructions import predicted_deep_1d_count


def count01(net, dim=1, **kw):
    return count_regions_relu(
        net, CounterOptions(domain=Box.uniform(0.0, 1.0, dim), **kw)
    )


class TestZigzagLayer:
    def test_four_unit_breakpoints(self):
        spec = zigzag_layer(4)
        np.testing.assert_allclose(
            spec.breakpoints, [1 / 9, 3 / 9, 5 / 9, 7 / 9], atol=1e-15
        )

    def test_breakpoint_spacing_consistency(self):
        # 1/t1 must equal 1/(t3-t2) + 1/(t4-t3); t4 is the right edge when n = 3
        for n in range(3, 13):
            t = np.concatenate([zigzag_layer(n).breakpoints, [1.0]])
            lhs = 1.0 / t[0]
            rhs = 1.0 / (t[2] - t[1]) + 1.0 / (t[3] - t[2])
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_readout_alternates_zero_one(self):
        for n in range(3, 9):
            spec = zigzag_layer(n)
            xs = np.concatenate([[0.0], spec.breakpoints, [1.0]])
            values = spec.readout(xs)
            expected = [i % 2 for i in range(n + 2)]
            np.testing.assert_allclose(values, expected, atol=1e-7)

    def test_pieces_are_affine_between_breakpoints(self):
        spec = zigzag_layer(5)
        knots = np.concatenate([[0.0], spec.breakpoints, [1.0]])
        for a, b in zip(knots, knots[1:]):
            xs = np.linspace(a + 1e-9, b - 1e-9, 9)
            ys = spec.readout(xs)
            slope = (ys[-1] - ys[0]) / (xs[-1] - xs[0])
            np.testing.assert_allclose(
                ys, ys[0] + slope * (xs - xs[0]), atol=1e-7
            )

    def test_unit_count_precondition(self):
        with pytest.raises(ValueError):
            zigzag_layer(2)

    def test_counted_regions(self):
        for n in range(3, 13):
            net = zigzag_layer(n).to_network()
            assert count01(net).count == n + 1

    def test_only_unit_three_points_left(self):
        spec = zigzag_layer(6)
        assert spec.unit_weights[2] < 0
        assert all(w > 0 for i, w in enumerate(spec.unit_weights) if i != 2)

    def test_units_break_at_their_breakpoints(self):
        spec = zigzag_layer(7)
        roots = -spec.unit_biases / spec.unit_weights
        np.testing.assert_allclose(roots, spec.breakpoints, atol=1e-12)


class TestDeep1D:
    def test_two_layer_count(self):
        assert count01(deep_1d((3, 3))).count == 16

    def test_single_layer_count(self):
        assert count01(deep_1d((4,))).count == 5

    def test_mixed_widths(self):
        assert count01(deep_1d((3, 4))).count == 20

    def test_count_equals_layered_upper_bound(self):
        for widths in [(3,), (5,), (3, 5), (4, 4), (5, 3)]:
            got = count01(deep_1d(widths)).count
            want = relu_upper = predicted_deep_1d_count(widths)
            assert got == want
            from linregions import relu_upper_thm1

            assert got == relu_upper_thm1(NetConfig(1, tuple(widths)))

    def test_every_region_has_line_image(self):
        net = deep_1d((3, 3))
        res = count01(net, collect_witnesses=True)
        hist = dimension_profile(res, net)
        assert hist == {1: 16}

    def test_width_precondition(self):
        with pytest.raises(ValueError):
            deep_1d((3, 2))


class TestMultiDim:
    def test_one_dim_matches_deep_1d(self):
        net = multi_dim(1, (3, 3), seed=0)
        assert count01(net).count == count01(deep_1d((3, 3))).count == 16

    def test_single_generic_layer_is_exact(self):
        net = multi_dim(2, (6,), seed=7)
        assert count01(net, dim=2).count == zaslavsky(6, 2) == 22

    def test_two_layer_reaches_lower_bound(self):
        net = multi_dim(2, (6, 6), seed=7)
        assert count01(net, dim=2).count >= thm3_lower(NetConfig(2, (6, 6))) == 352

    def test_remainder_units_change_nothing(self):
        base = multi_dim(2, (6,), seed=3)
        padded = multi_dim(2, (7,), seed=3)
        # 7 = 3*2 + 1: the generic last layer gains a hyperplane, so compare
        # a deep case where the remainder sits in a zigzag layer instead
        deep_base = multi_dim(2, (6, 6), seed=3)
        deep_padded = multi_dim(2, (7, 6), seed=3)
        c1 = count01(deep_base, dim=2).count
        c2 = count01(deep_padded, dim=2).count
        assert c2 == c1
        assert count01(padded, dim=2).count == zaslavsky(7, 2)
        del base

    def test_seeded_determinism(self):
        a = multi_dim(2, (6, 6), seed=11)
        b = multi_dim(2, (6, 6), seed=11)
        for la, lb in zip(a.layers, b.layers):
            np.testing.assert_array_equal(la.weights, lb.weights)

    def test_precondition(self):
        with pytest.raises(ValueError):
            multi_dim(2, (5, 6), seed=0)
