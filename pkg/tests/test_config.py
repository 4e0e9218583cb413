import pytest

from rifles.config import (
    default_config,
    parse_config,
    read_config,
    serialize_config,
    small_config,
    write_config,
)


class TestConfigFile:
    def test_serialize_parse_round_trip(self):
        for cfg in (default_config(), small_config()):
            text = serialize_config(cfg)
            assert serialize_config(parse_config(text)) == text

    def test_values_survive(self):
        cfg = parse_config(serialize_config(default_config()))
        assert cfg.trace.num_clients == 100
        assert cfg.run.seeds == tuple(range(10))
        assert cfg.schedule.selection_rate == 0.1
        assert cfg.run.use_heartbeats is True
        assert cfg.schedule.unique_threshold is None

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            parse_config("trace.bogus_knob = 3\n")

    def test_malformed_line_rejected(self):
        with pytest.raises(ValueError):
            parse_config("this is not a config line\n")

    def test_comments_and_blanks_ignored(self):
        cfg = parse_config("# comment\n\ntrace.num_clients = 5  # inline\n")
        assert cfg.trace.num_clients == 5

    def test_single_element_lists(self):
        cfg = parse_config("run.seeds = 3\nrun.policies = gh\n")
        assert cfg.run.seeds == (3,) and cfg.run.policies == ("gh",)

    def test_validation_runs_on_parse(self):
        with pytest.raises(ValueError):
            parse_config("trace.base_availability_prob = 2.0\n")
        with pytest.raises(ValueError):
            parse_config("run.policies = gh,nonsense\n")

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "scenario.cfg"
        write_config(small_config(), path)
        assert serialize_config(read_config(path)) == serialize_config(small_config())

    def test_output_dir_env_override(self, monkeypatch, tmp_path):
        cfg = small_config()
        assert str(cfg.output_dir()) == "out"
        monkeypatch.setenv("RIFLES_OUTPUT_DIR", str(tmp_path / "elsewhere"))
        assert cfg.output_dir() == tmp_path / "elsewhere"
