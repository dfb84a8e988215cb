"""Tests for settings loading and validation"""

import pytest

from unruh_otto.config import EngineSettings, LogFormat, OutputFormat
from unruh_otto.constants import LERCH_DEFAULT_REL_TOL, ORACLE_EPSILON_SCHEDULE, ORACLE_N_MAX
from unruh_otto.errors import ConfigError
from unruh_otto.kinematics import ClockConvention
from unruh_otto.oracle import OracleMode


class TestDefaults:
    def test_defaults(self):
        settings = EngineSettings.from_env()
        assert settings.scan.workers == 0
        assert settings.scan.format is None
        assert settings.scan.lerch_rel_tol == LERCH_DEFAULT_REL_TOL
        assert settings.scan.clock == ClockConvention.LORENTZ
        assert settings.oracle.epsilon_schedule == tuple(ORACLE_EPSILON_SCHEDULE)
        assert settings.oracle.n_max == ORACLE_N_MAX
        assert settings.oracle.oracle_mode == OracleMode.TWO_D
        assert settings.log_level == "WARNING"
        assert settings.log_format == LogFormat.TEXT
        assert settings.debug is False
        assert settings.validate() == []

    def test_as_dict(self):
        flat = EngineSettings.from_env().as_dict()
        assert flat["clock"] == "lorentz"
        assert flat["format"] is None
        assert flat["log_format"] == "text"
        assert flat["oracle_mode"] == "2d"
        assert set(flat) >= {"workers", "lerch_rel_tol", "epsilon_schedule", "n_max", "rel_tol", "abs_tol", "debug"}


class TestEnvironment:
    def test_env_overrides(self, monkeypatch):
        monkeypatch.setenv("UNRUH_OTTO_WORKERS", "3")
        monkeypatch.setenv("UNRUH_OTTO_FORMAT", "json")
        monkeypatch.setenv("UNRUH_OTTO_CLOCK", "squared")
        monkeypatch.setenv("UNRUH_OTTO_EPSILON_SCHEDULE", "0.1, 0.05")
        monkeypatch.setenv("UNRUH_OTTO_DEBUG", "yes")
        settings = EngineSettings.from_env()
        assert settings.scan.workers == 3
        assert settings.scan.format == OutputFormat.JSON
        assert settings.scan.clock == ClockConvention.SQUARED
        assert settings.oracle.epsilon_schedule == (0.1, 0.05)
        assert settings.debug is True

    def test_bad_env_value(self, monkeypatch):
        monkeypatch.setenv("UNRUH_OTTO_CLOCK", "sundial")
        with pytest.raises(ConfigError, match="environment"):
            EngineSettings.from_env()


class TestConfigFile:
    def test_file_applied(self, tmp_path):
        path = tmp_path / "engine.conf"
        path.write_text("workers = 2\nn_max = 300\nclock = squared\n# comment\nlog_level = INFO\n")
        settings = EngineSettings.load(str(path))
        assert settings.scan.workers == 2
        assert settings.oracle.n_max == 300
        assert settings.scan.clock == ClockConvention.SQUARED
        assert settings.log_level == "INFO"

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "engine.conf"
        path.write_text("workers = 2\ncolour = blue\n")
        with pytest.raises(ConfigError, match="unknown keys: colour"):
            EngineSettings.load(str(path))

    def test_key_without_value(self, tmp_path):
        path = tmp_path / "engine.conf"
        path.write_text("workers =\n")
        with pytest.raises(ConfigError, match="without values"):
            EngineSettings.load(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            EngineSettings.load(str(tmp_path / "absent.conf"))

    def test_unparsable_value(self, tmp_path):
        path = tmp_path / "engine.conf"
        path.write_text("n_max = many\n")
        with pytest.raises(ConfigError, match="invalid value for n_max"):
            EngineSettings.load(str(path))

    def test_precedence(self, tmp_path, monkeypatch):
        monkeypatch.setenv("UNRUH_OTTO_WORKERS", "5")
        monkeypatch.setenv("UNRUH_OTTO_N_MAX", "100")
        monkeypatch.setenv("UNRUH_OTTO_LOG_LEVEL", "ERROR")
        path = tmp_path / "engine.conf"
        path.write_text("workers = 2\nn_max = 300\n")
        settings = EngineSettings.load(str(path), overrides={"workers": 1, "format": None})
        assert settings.scan.workers == 1
        assert settings.oracle.n_max == 300
        assert settings.log_level == "ERROR"
        assert settings.scan.format is None


class TestValidate:
    def test_collects_errors(self):
        settings = EngineSettings.from_env()
        settings.update({"workers": "-1", "lerch_rel_tol": "1e-2", "log_level": "LOUD"})
        errors = settings.validate()
        assert len(errors) == 3
        assert any("workers" in e for e in errors)
        assert any("lerch_rel_tol" in e for e in errors)
        assert any("log_level" in e for e in errors)

    def test_oracle_errors_reported(self):
        settings = EngineSettings.from_env()
        settings.update({"epsilon_schedule": "0.05, 0.1"})
        assert settings.validate()

    def test_quadrature_config(self):
        settings = EngineSettings.from_env()
        settings.update({"rel_tol": "1e-4", "n_max": 50}, source="test")
        config = settings.oracle.quadrature_config()
        assert config.rel_tol == 1e-4
        assert config.n_max == 50

    def test_update_case_insensitive(self):
        settings = EngineSettings.from_env()
        settings.update({"WORKERS": "4"})
        assert settings.scan.workers == 4
