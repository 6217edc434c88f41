"""Run configuration files and validation."""

import pytest

from leakscan.config import ConfigError, RunConfig


class TestRoundTrip:
    def test_file_roundtrip(self, tmp_path):
        config = RunConfig(benchmark="bench.jsonl", corpus="corpus/",
                           corpus_mode="stream", corpus_glob="*.txt",
                           capacity=123, stride=3, distance="levenshtein",
                           prune=False, semantic_k=11, semantic_w=7,
                           workers=4, out_dir="results")
        path = tmp_path / "run.cfg"
        config.to_file(path)
        assert RunConfig.from_file(path) == config

    def test_defaults_roundtrip(self, tmp_path):
        config = RunConfig()
        path = tmp_path / "run.cfg"
        config.to_file(path)
        assert RunConfig.from_file(path) == config

    def test_comments_and_blanks_ignored(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# a comment\n\nwindow.stride = 2\n")
        assert RunConfig.from_file(path).stride == 2


class TestValidation:
    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("window.pitch = 3\n")
        with pytest.raises(ConfigError):
            RunConfig.from_file(path)

    def test_bad_int(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("window.stride = wide\n")
        with pytest.raises(ConfigError):
            RunConfig.from_file(path)

    def test_bad_bool(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("prune.enabled = yes\n")
        with pytest.raises(ConfigError):
            RunConfig.from_file(path)

    def test_bad_variant(self):
        with pytest.raises(ConfigError):
            RunConfig(distance="hamming").validate()

    def test_nonpositive_values(self):
        with pytest.raises(ConfigError):
            RunConfig(capacity=0).validate()
        with pytest.raises(ConfigError):
            RunConfig(stride=-1).validate()
