"""Training harness: determinism, metrics, CSV emission, countable exports."""

import csv
import subprocess

import numpy as np
import pytest

from nnexport import export_trained, run_experiment, train_small
from nnexport.harness import bound_via_cli, count_regions_via_cli, counting_command


def cli_validates(path):
    cmd = counting_command() + ["count", str(path), "--box", "0,1", "--json"]
    return subprocess.run(cmd, capture_output=True, text=True, timeout=600).returncode


class TestTrainSmall:
    def test_seeded_training_is_reproducible(self):
        a = train_small((4, 4), seed=0, epochs=3)
        b = train_small((4, 4), seed=0, epochs=3)
        for wa, wb in zip(a.weights, b.weights):
            np.testing.assert_array_equal(wa, wb)
        assert a.train_cross_entropy == b.train_cross_entropy
        assert a.test_error_rate == b.test_error_rate

    def test_training_actually_learns(self):
        model = train_small((8,), seed=1, epochs=20)
        assert model.test_error_rate < 0.25
        assert model.train_cross_entropy < 0.5

    def test_width_cap(self):
        with pytest.raises(ValueError, match="cap"):
            train_small((10, 10), seed=0)

    def test_untrained_export_counts(self, tmp_path):
        model = train_small((3, 3), seed=2, epochs=0)
        path = tmp_path / "untrained.json"
        export_trained(model, path)
        assert cli_validates(path) == 0

    def test_trained_count_respects_bound(self, tmp_path):
        model = train_small((4, 4), seed=0, epochs=20)
        path = tmp_path / "trained.json"
        export_trained(model, path)
        regions = count_regions_via_cli(path)
        assert regions >= 1
        assert regions <= bound_via_cli(64, (4, 4, 10))
        assert regions <= bound_via_cli(64, (4, 4))


class TestHarness:
    def test_ten_seeded_rows(self, tmp_path):
        rows, csv_path = run_experiment(
            (3, 3), seeds=range(10), out_dir=tmp_path, epochs=2
        )
        assert len(rows) == 10
        with open(csv_path, newline="") as fh:
            read = list(csv.DictReader(fh))
        assert len(read) == 10
        assert list(read[0]) == ["config", "seed", "regions", "ce", "mr", "model_path"]
        for row in read:
            assert row["config"] == "3-3"
            assert float(row["ce"]) > 0
            assert cli_validates(row["model_path"]) == 0

    def test_counted_experiment(self, tmp_path):
        rows, _ = run_experiment((3,), seeds=[0, 1], out_dir=tmp_path, epochs=2,
                                 count=True)
        bound = bound_via_cli(64, (3,))
        for row in rows:
            assert 1 <= int(row["regions"]) <= bound
