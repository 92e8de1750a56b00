import json

import pandas as pd
import pytest

from wassdim.adapters.outbound.filesystem import FilesystemResultsSinkAdapter


@pytest.fixture
def sink(tmp_path):
    return FilesystemResultsSinkAdapter(tmp_path / "run")


def test_results_keep_column_order_and_blank_missing_values(sink, tmp_path):
    rows = [
        {"seed": 0, "d_hat": 2.1, "status": "ok", "ignored": 1},
        {"seed": 1, "status": "failed: boom"},
    ]
    sink.write_results(rows, ["seed", "d_hat", "status"])

    path = tmp_path / "run" / "results.csv"
    assert path.read_text().splitlines()[0] == "seed,d_hat,status"
    frame = pd.read_csv(path)
    assert frame["d_hat"].isna().tolist() == [False, True]
    assert frame["status"].tolist() == ["ok", "failed: boom"]


def test_empty_series_still_writes_a_header(sink, tmp_path):
    sink.write_series([], ["k", "w1"])
    assert (tmp_path / "run" / "series.csv").read_text().strip() == "k,w1"


def test_manifest_is_json(sink, tmp_path):
    sink.write_manifest({"experiment": "swiss_roll", "seeds": [0, 1], "out": tmp_path})
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert manifest["seeds"] == [0, 1]
    assert manifest["out"] == str(tmp_path)
