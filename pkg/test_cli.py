"""End-to-end tests of the command-line interface and its exit codes."""

import orjson
import pandas as pd
import pytest

from vesselcast.main import main
from vesselcast.prep import TRIPS_HEADER

FAST = ["--rounds", "15", "--depth", "4", "--lr", "0.3", "--bins", "64", "--horizons", "10,20,30"]


@pytest.fixture
def fleet_dir(tmp_path):
    out = tmp_path / "fleet"
    assert main(["synth", "--out", str(out), "--vessels", "5", "--seed", "3"]) == 0
    return out


def test_full_pipeline(fleet_dir, tmp_path, capsys):
    """synth -> preprocess -> train -> predict -> evaluate, all exit 0."""
    ais, pois = str(fleet_dir / "ais.csv"), str(fleet_dir / "pois.csv")
    trips, model = tmp_path / "trips.csv", tmp_path / "model.txt"
    stats = tmp_path / "stats.json"

    assert main(["preprocess", "--input", ais, "--out", str(trips), "--pois", pois,
                 "--stats-json", str(stats), *FAST]) == 0
    assert trips.read_text().split("\n")[0] == TRIPS_HEADER
    summary = orjson.loads(stats.read_bytes())
    assert summary["prep"]["records_in"] == summary["ingest"]["rows_read"]
    assert summary["dataset"]["trips"] > 0

    assert main(["train", "--input", str(trips), "--model", str(model),
                 "--dump-matrix", str(tmp_path / "matrix.csv"), *FAST]) == 0
    assert model.read_text().startswith("FLPXR-MODEL\nVERSION 1\n")
    assert "n_estimators=15\n" in model.read_text()
    assert (tmp_path / "matrix.csv").exists()

    pred = tmp_path / "pred.csv"
    assert main(["predict", "--input", str(trips), "--model", str(model), "--out", str(pred)]) == 0
    frame = pd.read_csv(pred)
    assert list(frame.columns) == ["vessel_id", "timestamp", "horizon_min", "pred_lon", "pred_lat"]
    assert set(frame["horizon_min"]) == {10, 20, 30}

    report = tmp_path / "report.csv"
    assert main(["evaluate", "--input", str(trips), "--out", str(report),
                 "--predictions", str(pred), "--dataset", "synthetic", *FAST]) == 0
    frame = pd.read_csv(report)
    assert frame["horizon_min"].tolist() == [10, 20, 30]
    assert (frame["count"] > 0).all()

    capsys.readouterr()
    assert main(["evaluate", "--input", ais, "--out", str(tmp_path / "holdout.csv"), *FAST]) == 0
    out = capsys.readouterr().out
    assert "Evaluation" in out and "Split:" in out


def test_grid_subcommand(fleet_dir, tmp_path):
    out = tmp_path / "grid.csv"
    code = main(["grid", "--input", str(fleet_dir / "ais.csv"), "--out", str(out),
                 "--axis", "depth", "--values", "2,3", *FAST])
    assert code == 0
    frame = pd.read_csv(out)
    assert frame["value"].tolist() == [2, 3]
    assert list(frame.columns)[-3:] == ["err10", "err20", "err30"]


def test_missing_required_flag_is_usage_error():
    assert main(["train", "--model", "m.txt"]) == 2


def test_unknown_grid_axis_is_config_error(fleet_dir, tmp_path):
    code = main(["grid", "--input", str(fleet_dir / "ais.csv"), "--out", str(tmp_path / "g.csv"),
                 "--axis", "bogus", "--values", "1"])
    assert code == 2


def test_invalid_flag_value_is_config_error(tmp_path):
    assert main(["preprocess", "--input", "x.csv", "--out", str(tmp_path / "t.csv"), "--rate", "0"]) == 2


def test_unreadable_input_is_io_error(tmp_path):
    code = main(["preprocess", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "t.csv")])
    assert code == 3
    code = main(["train", "--input", str(tmp_path / "missing.csv"), "--model", str(tmp_path / "m.txt")])
    assert code == 3


def test_malformed_model_is_model_error(fleet_dir, tmp_path, capsys):
    model = tmp_path / "model.txt"
    model.write_text("FLPXR-MODEL\nVERSION 1\n[PARAMS]\nn_estimators=3\n")
    code = main(["predict", "--input", str(fleet_dir / "ais.csv"), "--model", str(model),
                 "--out", str(tmp_path / "p.csv")])
    assert code == 5
    assert "error:" in capsys.readouterr().err


def test_all_stationary_input_yields_empty_trips(tmp_path, capsys):
    ais = tmp_path / "ais.csv"
    rows = "".join(f"111,{1_000_000 + 30 * i},-4.5,48.4\n" for i in range(60))
    ais.write_text("sourcemmsi,t,lon,lat\n" + rows)
    trips = tmp_path / "trips.csv"
    assert main(["preprocess", "--input", str(ais), "--out", str(trips)]) == 0
    assert trips.read_text() == TRIPS_HEADER + "\n"
    assert "no trips survived" in capsys.readouterr().out


def test_training_on_empty_trips_is_insufficient_data(tmp_path):
    trips = tmp_path / "trips.csv"
    trips.write_text(TRIPS_HEADER + "\n")
    assert main(["train", "--input", str(trips), "--model", str(tmp_path / "m.txt")]) == 4


def test_reordered_model_features_exit_with_schema_code(fleet_dir, tmp_path):
    trips, model = tmp_path / "trips.csv", tmp_path / "model.txt"
    assert main(["preprocess", "--input", str(fleet_dir / "ais.csv"), "--out", str(trips), *FAST]) == 0
    assert main(["train", "--input", str(trips), "--model", str(model), *FAST]) == 0
    model.write_text(model.read_text().replace("\nsp\nbr\n", "\nbr\nsp\n", 1))
    code = main(["predict", "--input", str(trips), "--model", str(model), "--out", str(tmp_path / "p.csv")])
    assert code == 5
