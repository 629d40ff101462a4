import json

import pytest
from click.testing import CliRunner

from codedunlearn.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def data_csv(tmp_path, runner):
    out = tmp_path / "data.csv"
    result = runner.invoke(main, [
        "gen-data", "--kind", "gaussian-linear", "--n", "120", "--d", "4",
        "--seed", "7", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    return out


def train_session(runner, tmp_path, data_csv, extra=()):
    session = tmp_path / "session"
    result = runner.invoke(main, [
        "train", "--data", str(data_csv), "--response-column", "y",
        "--s", "4", "--r", "2", "--rho", "minimal", "--lam", "0.001",
        "--seed", "3", "--session", str(session), *extra,
    ])
    assert result.exit_code == 0, result.output
    return session


class TestGenData:
    def test_row_count_and_sidecar(self, tmp_path, runner):
        out = tmp_path / "d.csv"
        result = runner.invoke(main, [
            "gen-data", "--kind", "gaussian-linear", "--n", "50", "--d", "3",
            "--seed", "1", "--out", str(out),
        ])
        assert result.exit_code == 0
        assert len(out.read_text().splitlines()) == 51
        sidecar = json.loads((tmp_path / "d.csv.spec.json").read_text())
        assert sidecar["kind"] == "gaussian-linear" and sidecar["seed"] == 1

    def test_identical_bytes_on_rerun(self, tmp_path, runner):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            runner.invoke(main, [
                "gen-data", "--kind", "lognormal-poly", "--n", "30",
                "--d", "2", "--sigma2", "0.5", "--seed", "9",
                "--out", str(out),
            ])
        assert a.read_bytes() == b.read_bytes()

    def test_sidecar_round_trips_spec(self, tmp_path, runner):
        from codedunlearn import SyntheticSpec

        out = tmp_path / "d.csv"
        runner.invoke(main, [
            "gen-data", "--kind", "chisquare-poly", "--n", "20", "--d", "2",
            "--seed", "4", "--out", str(out),
        ])
        raw = json.loads((tmp_path / "d.csv.spec.json").read_text())
        raw["layer_widths"] = tuple(raw["layer_widths"])
        assert SyntheticSpec(**raw) == SyntheticSpec(
            "chisquare-poly", n=20, d=2, seed=4)


class TestSessionWorkflow:
    def test_train_then_verify(self, tmp_path, runner, data_csv):
        session = train_session(runner, tmp_path, data_csv)
        assert (session / "manifest.json").exists()
        assert (session / "shards" / "shard_0.csv").exists()
        result = runner.invoke(main, ["verify", "--session", str(session)])
        assert result.exit_code == 0, result.output
        assert "discrepancy: 0.000e+00" in result.output

    def test_train_unlearn_verify(self, tmp_path, runner, data_csv):
        session = train_session(runner, tmp_path, data_csv)
        result = runner.invoke(main, [
            "unlearn", "--session", str(session), "--ids", "5,17",
        ])
        assert result.exit_code == 0, result.output
        log = (session / "unlearn_log.jsonl").read_text().splitlines()
        assert json.loads(log[0])["ids"] == [5, 17]
        result = runner.invoke(main, ["verify", "--session", str(session)])
        assert result.exit_code == 0, result.output

    def test_unlearn_unknown_id_exits_nonzero(self, tmp_path, runner,
                                              data_csv):
        session = train_session(runner, tmp_path, data_csv)
        result = runner.invoke(main, [
            "unlearn", "--session", str(session), "--ids", "9999",
        ])
        assert result.exit_code == 3
        assert "not in the learned training set" in result.output

    def test_predict_writes_one_value_per_row(self, tmp_path, runner,
                                              data_csv):
        session = train_session(runner, tmp_path, data_csv)
        feats = tmp_path / "feats.csv"
        lines = data_csv.read_text().splitlines()
        feats.write_text("\n".join(
            ",".join(line.split(",")[:-1]) for line in lines[:6]) + "\n")
        out = tmp_path / "preds.csv"
        result = runner.invoke(main, [
            "predict", "--session", str(session), "--data", str(feats),
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert len(out.read_text().splitlines()) == 6  # header + 5 rows

    def test_stale_session_detected(self, tmp_path, runner, data_csv):
        session = train_session(runner, tmp_path, data_csv)
        model = session / "model.csv"
        model.write_text(model.read_text().replace("0", "1", 1))
        result = runner.invoke(main, ["verify", "--session", str(session)])
        assert result.exit_code == 3
        assert "stale" in result.output

    def test_projection_session(self, tmp_path, runner, data_csv):
        session = train_session(runner, tmp_path, data_csv,
                                extra=["--proj-dim", "8"])
        assert (session / "projection.bin").exists()
        result = runner.invoke(main, [
            "unlearn", "--session", str(session), "--ids", "3",
        ])
        assert result.exit_code == 0, result.output
        result = runner.invoke(main, ["verify", "--session", str(session)])
        assert result.exit_code == 0, result.output

    def test_config_file_with_flag_override(self, tmp_path, runner, data_csv):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "data": str(data_csv), "response_column": "y", "s": 4, "tau": 2,
            "rho": "minimal", "lambda": 0.001, "seed": 1,
        }))
        session = tmp_path / "cfg-session"
        result = runner.invoke(main, [
            "train", "--config", str(cfg), "--seed", "2",
            "--session", str(session),
        ])
        assert result.exit_code == 0, result.output
        manifest = json.loads((session / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 2  # flag wins over config
        assert manifest["config"]["r"] == 2     # derived from tau

    def test_lock_blocks_concurrent_use(self, tmp_path, runner, data_csv):
        session = train_session(runner, tmp_path, data_csv)
        (session / "lock").write_text("123")
        result = runner.invoke(main, [
            "unlearn", "--session", str(session), "--ids", "1",
        ])
        assert result.exit_code == 3
        assert "locked" in result.output


class TestBenchCommands:
    def test_tradeoff_sweep(self, tmp_path, runner):
        spec = tmp_path / "sweep.json"
        spec.write_text(json.dumps({
            "dataset": {"kind": "gaussian-linear", "n": 200, "d": 3,
                        "seed": 2},
            "n_train": 150, "lambdas": [0.001], "rates": [1, 3],
            "shard_counts": [3], "runs": 2, "seed": 5,
        }))
        out = tmp_path / "records.csv"
        result = runner.invoke(main, [
            "bench-tradeoff", "--spec", str(spec), "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# config:")
        assert len(lines) == 4  # comment + header + 2 cells

    def test_empty_sweep_is_usage_error(self, tmp_path, runner):
        spec = tmp_path / "sweep.json"
        spec.write_text(json.dumps({
            "dataset": {"kind": "gaussian-linear", "n": 100, "d": 2},
            "n_train": 50, "lambdas": [], "rates": [], "shard_counts": [],
        }))
        result = runner.invoke(main, [
            "bench-tradeoff", "--spec", str(spec), "--out",
            str(tmp_path / "x.csv"),
        ])
        assert result.exit_code == 2

    def test_influence_sweep_json(self, tmp_path, runner):
        spec = tmp_path / "inf.json"
        spec.write_text(json.dumps({
            "dataset": {"kind": "gaussian-linear", "n": 200, "d": 3,
                        "seed": 2},
            "n_train": 150, "percentiles": [0, 10], "runs": 2, "lambda": 0.0,
        }))
        out = tmp_path / "inf.json.out"
        result = runner.invoke(main, [
            "bench-influence", "--spec", str(spec), "--out", str(out),
            "--format", "json",
        ])
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert len(payload["records"]) == 4
        assert payload["config"]["percentiles"] == [0, 10]
