import os

import pytest
from pydantic import ValidationError

from nvmo.config import NvmoSettings, get_settings
from nvmo.config.settings import SETTINGS_FILE
from nvmo.schemas.logging import LogLevel


def test_defaults(settings):
    assert settings.dt == 1e-3
    assert settings.condition_limit == 1e8
    assert settings.initial_position == [0.0, 0.0, -2.5]
    assert settings.log_level is None


def test_environment_overrides(settings, monkeypatch):
    monkeypatch.setenv("NVMO_DT", "0.002")
    monkeypatch.setenv("NVMO_LOG_LEVEL", "debug")
    s = NvmoSettings()
    assert s.dt == 0.002
    assert s.log_level == LogLevel.DEBUG


def test_yaml_file_is_read(settings, tmp_path):
    (tmp_path / SETTINGS_FILE).write_text("dt: 0.0005\nenumeration_limit: 7\n", encoding="utf-8")
    s = NvmoSettings()
    assert s.dt == 0.0005
    assert s.enumeration_limit == 7


def test_environment_beats_yaml(settings, tmp_path, monkeypatch):
    (tmp_path / SETTINGS_FILE).write_text("dt: 0.0005\n", encoding="utf-8")
    monkeypatch.setenv("NVMO_DT", "0.004")
    assert NvmoSettings().dt == 0.004


def test_validation(settings):
    with pytest.raises(ValidationError):
        NvmoSettings(dt=0.0)
    with pytest.raises(ValidationError):
        NvmoSettings(initial_position=[0.0, 0.0])


def test_get_settings_reloads_changed_file(settings, tmp_path):
    path = tmp_path / SETTINGS_FILE
    path.write_text("horizon_static: 12.0\n", encoding="utf-8")
    assert get_settings().horizon_static == 12.0

    path.write_text("horizon_static: 13.0\n", encoding="utf-8")
    stat = path.stat()
    os.utime(path, (stat.st_atime, stat.st_mtime + 10))
    assert get_settings().horizon_static == 13.0


def test_template_has_comments(settings, tmp_path):
    target = tmp_path / "template.yaml"
    text = settings.create_template_file(write_file=target)
    assert "Integration step (s)." in text
    assert "jacobian_step:" in text
    assert target.read_text(encoding="utf-8") == text
