"""
Tests for environment settings and logging setup.
"""

import logging

import pytest
import structlog
from pydantic import ValidationError

from settings import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_QUAD_TOL,
    FareySettings,
    configure_logging,
    get_settings,
)


@pytest.mark.unit
class TestFareySettings:
    """Test cases for FareySettings."""

    def test_defaults(self, clean_env):
        """Test values with an empty environment."""
        settings = FareySettings.from_env()
        assert settings.log_level == "INFO"
        assert settings.threads == 1
        assert settings.quad_tol == DEFAULT_QUAD_TOL
        assert settings.max_depth == DEFAULT_MAX_DEPTH
        assert settings.curve_t_cap == 1e4

    def test_reads_environment(self, clean_env):
        """Test FAREY_* variables."""
        clean_env.setenv("FAREY_THREADS", "4")
        clean_env.setenv("FAREY_SEED", "17")
        clean_env.setenv("LOG_LEVEL", "debug")
        settings = FareySettings.from_env()
        assert settings.threads == 4
        assert settings.seed == 17
        assert settings.log_level == "DEBUG"

    def test_empty_variable_is_ignored(self, clean_env):
        """Test that FAREY_THREADS= keeps the default."""
        clean_env.setenv("FAREY_THREADS", "")
        assert FareySettings.from_env().threads == 1

    @pytest.mark.parametrize(
        "var,value",
        [("FAREY_THREADS", "0"), ("FAREY_THREADS", "many"), ("FAREY_QUAD_TOL", "-1"), ("LOG_LEVEL", "LOUD")],
    )
    def test_invalid_values_raise_error(self, clean_env, var, value):
        """Test that bad values raise ValueError."""
        clean_env.setenv(var, value)
        with pytest.raises(ValueError):
            FareySettings.from_env()

    def test_validation_error_is_value_error(self):
        """Test that the CLI can catch pydantic errors as ValueError."""
        assert issubclass(ValidationError, ValueError)

    def test_get_settings_is_cached(self, clean_env):
        """Test that settings are read once."""
        get_settings.cache_clear()
        try:
            assert get_settings() is get_settings()
        finally:
            get_settings.cache_clear()


@pytest.mark.unit
class TestLogging:
    """Test cases for configure_logging."""

    def test_level_and_file(self, tmp_path):
        """Test that events reach the log file as key/value lines."""
        log_file = tmp_path / "farey.log"
        configure_logging(FareySettings(log_level="DEBUG", log_file=str(log_file)))
        structlog.get_logger("tests").info("settings_check", windows=8)
        for handler in logging.getLogger().handlers:
            handler.flush()
        text = log_file.read_text()
        assert "event='settings_check'" in text
        assert "windows=8" in text
        assert logging.getLogger().level == logging.DEBUG
