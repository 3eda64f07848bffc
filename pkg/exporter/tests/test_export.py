"""Exported documents must satisfy the counting tool's file contract."""

import json
import subprocess

import numpy as np
import pytest

from nnexport import ExportError, build_document, export_model
from nnexport.harness import counting_command


def cli_count(path, box="-50,50"):
    cmd = counting_command() + ["count", str(path), "--box", box, "--json"]
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)["count"]


FIG2_WEIGHTS = [
    np.array([[-1.0, 1.0], [1.0, 1.0]]),
    np.array([[-1.0, -3.0], [-3.0, -1.0]]),
    np.array([[1.0, 3.0], [3.0, 1.0]]),
]
FIG2_BIASES = [
    np.array([0.0, -4.0]),
    np.array([4.0, 4.0]),
    np.array([-4.0, -4.0]),
]


class TestExport:
    def test_reference_arrays_count_to_20_via_cli(self, tmp_path):
        path = tmp_path / "fig2.json"
        export_model(2, FIG2_WEIGHTS, FIG2_BIASES, ["relu"] * 3, path)
        assert cli_count(path) == 20

    def test_empty_hidden_list(self, tmp_path):
        path = tmp_path / "affine.json"
        export_model(3, [np.eye(3)], [np.zeros(3)], ["linear"], path)
        doc = json.loads(path.read_text())
        assert doc["layers"] == []
        assert cli_count(path, box="0,1") == 1

    def test_transposed_matrix_names_layer(self):
        with pytest.raises(ExportError, match="layer 2"):
            build_document(
                2,
                [np.ones((3, 2)), np.ones((3, 5))],
                [np.zeros(3), np.zeros(3)],
                ["relu", "relu"],
            )

    def test_unsupported_tag(self):
        with pytest.raises(ExportError, match="unsupported activation tag"):
            build_document(2, [np.ones((2, 2))], [np.zeros(2)], ["sigmoid"])

    def test_bias_shape_mismatch(self):
        with pytest.raises(ExportError, match="bias"):
            build_document(2, [np.ones((2, 2))], [np.zeros(3)], ["relu"])

    def test_linear_must_be_last(self):
        with pytest.raises(ExportError, match="last"):
            build_document(
                2,
                [np.ones((2, 2)), np.ones((2, 2))],
                [np.zeros(2), np.zeros(2)],
                ["linear", "relu"],
            )

    def test_maxout_stack(self, tmp_path):
        path = tmp_path / "maxout.json"
        export_model(
            1,
            [np.array([[[1.0]], [[-1.0]]])],
            [np.array([[0.0], [0.0]])],
            ["maxout"],
            path,
        )
        assert cli_count(path, box="-1,1") == 2

    def test_full_double_precision_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        w = rng.normal(size=(3, 2))
        path = tmp_path / "precise.json"
        export_model(2, [w], [rng.normal(size=3)], ["relu"], path)
        doc = json.loads(path.read_text())
        np.testing.assert_array_equal(np.array(doc["layers"][0]["weights"]), w)
