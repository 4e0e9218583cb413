import json
import time

import pytest

from rifles.cli import main
from rifles.config import small_config, write_config
from rifles.core import read_matrix_csv, write_matrix_csv
from rifles.pipeline import Pipeline, StageError
from rifles.predictors import persistence_predict
from tests.conftest import random_matrix


@pytest.fixture
def small_cfg_file(tmp_path):
    path = tmp_path / "scenario.cfg"
    write_config(small_config(), path)
    return path


class TestPipeline:
    def test_full_small_pipeline_under_five_seconds(self, tmp_path, small_cfg_file):
        start = time.time()
        rc = main(["pipeline", "--config", str(small_cfg_file),
                   "--out", str(tmp_path / "out")])
        elapsed = time.time() - start
        assert rc == 0
        assert elapsed < 5.0
        root = tmp_path / "out"
        assert (root / "summary.json").exists()
        assert (root / "report.txt").exists()
        assert (root / "seed_0" / "truth" / "day_1.csv").exists()
        assert (root / "seed_0" / "schedules").is_dir()
        # the output tree carries the exact config that produced it,
        # and that copy re-validates
        from rifles.config import read_config, serialize_config
        assert serialize_config(read_config(root / "config.cfg")) == \
            (root / "config.cfg").read_text()

    def test_rerun_is_noop_and_byte_identical(self, tmp_path, small_cfg_file):
        out = tmp_path / "out"
        assert main(["pipeline", "--config", str(small_cfg_file), "--out", str(out)]) == 0
        first = (out / "summary.json").read_bytes()
        first_manifest = (out / "manifest.json").read_text()
        start = time.time()
        assert main(["pipeline", "--config", str(small_cfg_file), "--out", str(out)]) == 0
        assert time.time() - start < 2.0  # all stages skipped
        assert (out / "summary.json").read_bytes() == first
        assert (out / "manifest.json").read_text() == first_manifest

    def test_same_config_two_dirs_identical_summaries(self, tmp_path, small_cfg_file):
        for name in ("a", "b"):
            assert main(["pipeline", "--config", str(small_cfg_file),
                         "--out", str(tmp_path / name)]) == 0
        assert (tmp_path / "a" / "summary.json").read_bytes() == \
               (tmp_path / "b" / "summary.json").read_bytes()

    def test_missing_upstream_artifacts_name_the_producer(self, tmp_path):
        pipe = Pipeline(small_config(), out_dir=tmp_path / "empty")
        with pytest.raises(StageError, match="gen"):
            pipe.run_ingest(seed=0)
        with pytest.raises(StageError, match="predict"):
            pipe.run_eligibility(seed=0)

    def test_simulate_without_metrics_fails_report(self, tmp_path):
        pipe = Pipeline(small_config(), out_dir=tmp_path / "empty")
        with pytest.raises(StageError, match="simulate"):
            pipe.run_report()


class TestCliStages:
    def test_seed_required_without_config(self, tmp_path, capsys):
        with pytest.raises(SystemExit):
            main(["gen", "--out", str(tmp_path / "o")])

    def test_gen_then_ingest(self, tmp_path, small_cfg_file):
        out = tmp_path / "o"
        assert main(["gen", "--config", str(small_cfg_file), "--out", str(out),
                     "--seed", "0"]) == 0
        assert (out / "seed_0" / "truth" / "profiles.json").exists()
        assert main(["ingest", "--config", str(small_cfg_file), "--out", str(out),
                     "--seed", "0"]) == 0
        assert (out / "seed_0" / "observed" / "day_1.csv").exists()

    def test_set_overrides(self, tmp_path, small_cfg_file):
        out = tmp_path / "o"
        rc = main(["gen", "--config", str(small_cfg_file), "--out", str(out),
                   "--seed", "0", "--set", "trace.num_days=3"])
        assert rc == 0
        assert (out / "seed_0" / "truth" / "day_3.csv").exists()

    def test_init_writes_template(self, tmp_path):
        path = tmp_path / "t.cfg"
        assert main(["init", "--template", "small", "--out", str(path)]) == 0
        assert "trace.num_clients = 10" in path.read_text()


class TestPredictStandalone:
    def test_history_mode_matches_library(self, tmp_path, rng):
        history = [random_matrix(rng, 24, 4, p=0.5, day=d) for d in range(1, 4)]
        hist_dir = tmp_path / "hist"
        hist_dir.mkdir()
        for m in history:
            write_matrix_csv(m, hist_dir / f"day_{m.day}.csv")
        out = tmp_path / "pa.csv"
        rc = main(["predict", "--history", str(hist_dir),
                   "--predictor", "persistence", "--pa-out", str(out)])
        assert rc == 0
        expected = persistence_predict(history)
        assert read_matrix_csv(out, day=4) == expected

    def test_days_flag_limits_history(self, tmp_path, rng):
        history = [random_matrix(rng, 12, 2, p=0.5, day=d) for d in range(1, 5)]
        hist_dir = tmp_path / "hist"
        hist_dir.mkdir()
        for m in history:
            write_matrix_csv(m, hist_dir / f"day_{m.day}.csv")
        out = tmp_path / "pa.csv"
        assert main(["predict", "--history", str(hist_dir), "--days", "2",
                     "--pa-out", str(out)]) == 0
        assert read_matrix_csv(out, day=5) == persistence_predict(history[-2:])


class TestVerifyCli:
    def test_exit_codes(self, tmp_path, capsys):
        instance = tmp_path / "instance.json"
        instance.write_text(json.dumps({
            "num_clients": 1, "tasks_per_job": 1,
            "alpha": "1", "beta": "1", "deadline": 1,
        }))
        good = tmp_path / "good.json"
        good.write_text(json.dumps({"placements": [
            {"slot": 1, "client": 1, "job": 1, "task": 1}]}))
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"placements": []}))
        assert main(["verify", "--instance", str(instance), "--schedule", str(good)]) == 0
        verdict = json.loads(capsys.readouterr().out)
        assert verdict["accepted"] is True
        assert main(["verify", "--instance", str(instance), "--schedule", str(bad)]) == 1
        verdict = json.loads(capsys.readouterr().out)
        assert verdict["condition"] == "iii"

    def test_malformed_schedule_exit_two(self, tmp_path, capsys):
        instance = tmp_path / "instance.json"
        instance.write_text(json.dumps({
            "num_clients": 1, "tasks_per_job": 1,
            "alpha": "1", "beta": "1", "deadline": 1,
        }))
        malformed = tmp_path / "malformed.json"
        malformed.write_text(json.dumps({"placements": [
            {"slot": 1, "client": 7, "job": 1, "task": 1}]}))
        assert main(["verify", "--instance", str(instance),
                     "--schedule", str(malformed)]) == 2


class TestReportCli:
    def test_report_and_plotdata(self, tmp_path, small_cfg_file):
        out = tmp_path / "out"
        assert main(["pipeline", "--config", str(small_cfg_file), "--out", str(out)]) == 0
        metrics = sorted((out / "metrics").glob("*.csv"))
        assert main(["report", "--metrics", *map(str, metrics)]) == 0
        plot = tmp_path / "plot.csv"
        assert main(["plotdata", "--metrics", *map(str, metrics),
                     "--out", str(plot)]) == 0
        assert plot.exists()
