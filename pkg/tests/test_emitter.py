"""
Tests for the artifact writer.
"""
import json
import os
import shutil
import tempfile

import numpy as np
import pandas as pd
import pytest

from src.models.schema import PlotBlock
from src.services.emitter import OutputWriter, emit_plotdata


@pytest.fixture
def temp_dir():
    """Create a temporary directory for output."""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir)


class TestEmitPlotdata:
    """Test the plot-data file format."""

    def test_blocks(self, temp_dir):
        """Blocks are labelled, headed by their columns and separated by a blank line."""
        blocks = [
            PlotBlock("t=0", ["x", "abs"], np.array([[0.0, 1.0], [0.5, 2.5]])),
            PlotBlock("t=1", ["x", "abs"], np.array([[0.0, 0.1]])),
        ]
        path = emit_plotdata(blocks, os.path.join(temp_dir, "snapshots.dat"), "snapshots")
        with open(path) as f:
            lines = f.read().split("\n")
        assert lines == [
            "# snapshots",
            "# t=0", "# x abs", "0 1", "0.5 2.5",
            "",
            "# t=1", "# x abs", "0 0.10000000000000001",
            "",
        ]

    def test_shape_mismatch(self, temp_dir):
        """Rows must match the declared columns and nothing is left behind."""
        path = os.path.join(temp_dir, "bad.dat")
        with pytest.raises(ValueError):
            emit_plotdata([PlotBlock("bad", ["x", "y", "z"], np.zeros((2, 2)))], path)
        assert os.listdir(temp_dir) == []

    def test_creates_directory(self, temp_dir):
        """Missing parent directories are created."""
        path = os.path.join(temp_dir, "nested", "curve.dat")
        emit_plotdata([PlotBlock("curve", ["gamma"], np.array([[1.0]]))], path)
        assert os.path.exists(path)


class TestOutputWriter:
    """Test CSV and JSON artifacts."""

    def test_csv_full_precision(self, temp_dir):
        """Floats keep 17 significant digits and there is no index column."""
        writer = OutputWriter(temp_dir)
        writer.write_csv(pd.DataFrame({"x": [0.1, 2.0], "n": [1, 2]}), "table.csv")
        with open(os.path.join(temp_dir, "table.csv")) as f:
            assert f.read() == "x,n\n0.10000000000000001,1\n2,2\n"

    def test_json_values(self, temp_dir):
        """Complex numbers become [re, im] pairs and numpy values become plain JSON."""
        writer = OutputWriter(temp_dir)
        writer.write_json({"z": 1 + 2j, "arr": np.arange(3), "n": np.int64(4), "f": np.float64(0.5)}, "out.json")
        with open(os.path.join(temp_dir, "out.json")) as f:
            data = json.load(f)
        assert data == {"z": [1.0, 2.0], "arr": [0, 1, 2], "n": 4, "f": 0.5}

    def test_artifacts_recorded_once(self, temp_dir):
        """Rewriting a file does not duplicate its artifact entry."""
        writer = OutputWriter(os.path.join(temp_dir, "run"))
        writer.write_json({"a": 1}, "manifest.json")
        writer.write_json({"a": 2}, "manifest.json")
        writer.write_plotdata([PlotBlock("b", ["x"], np.array([[1.0]]))], "plot.dat")
        assert writer.artifacts == ["manifest.json", "plot.dat"]
        assert sorted(os.listdir(writer.out_dir)) == ["manifest.json", "plot.dat"]
