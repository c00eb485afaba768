import pytest
from pydantic import ValidationError

from config import Config, parse_stages
from core.workbench import NapWorkbench


def test_defaults(monkeypatch):
    for name in ("NAP_LOG_LEVEL", "NAP_DEFAULT_DEPTH", "NAP_DEFAULT_STAGES", "NAP_MAX_EXHAUSTIVE_ATOMS"):
        monkeypatch.delenv(name, raising=False)
    config = Config(_env_file=None)
    assert config.log_level == "WARNING"
    assert config.max_exhaustive_atoms == 10
    assert config.default_depth == 2
    assert config.stages == [2, 4, 8, 16]
    assert not config.allow_large_tables


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("NAP_DEFAULT_DEPTH", "5")
    monkeypatch.setenv("NAP_DEFAULT_STAGES", "3,9")
    config = Config(_env_file=None)
    assert config.default_depth == 5
    assert config.stages == [3, 9]


def test_validation():
    with pytest.raises(ValidationError):
        Config(_env_file=None, max_exhaustive_atoms=0)
    with pytest.raises(ValidationError):
        Config(_env_file=None, default_depth=100)
    with pytest.raises(ValidationError):
        Config(_env_file=None, default_stages="1,2")


def test_parse_stages():
    assert parse_stages("2, 4,8") == [2, 4, 8]
    with pytest.raises(ValueError):
        parse_stages("2,x")
    with pytest.raises(ValueError):
        parse_stages("")


def test_workbench_fills_defaults_from_config(tmp_path):
    config = Config(_env_file=None, default_depth=4, default_stages="2,3", output_dir=str(tmp_path))
    workbench = NapWorkbench(config)
    assert workbench.defaults("query")["depth"] == 4
    assert workbench.defaults("snapshot")["stages"] == [2, 3]
    assert "depth" not in workbench.defaults("check")
