import json

import pytest

from spinberry import config
from spinberry.errors import ConfigError


def test_defaults_are_valid():
    cfg = config.load()
    assert cfg["format"] == config.FORMAT_TAG
    assert cfg["quadrature"] == {"n_r": 64, "n_theta": 32, "n_phi": 32}


def test_file_and_overrides(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"format": config.FORMAT_TAG, "mass": 2.0, "contour": {"shape": "circle", "theta": 0.5, "n": 100}}))
    cfg = config.load(path, {"profile.width": 0.5})
    assert cfg["mass"] == 2.0
    assert cfg["contour"] == {"shape": "circle", "theta": 0.5, "n": 100}
    assert cfg["profile"]["width"] == 0.5


def test_hash_ignores_output_block():
    a = config.load()
    b = config.load(overrides={"output.format": "csv"})
    c = config.load(overrides={"mass": 2.0})
    assert config.config_hash(a) == config.config_hash(b)
    assert config.config_hash(a) != config.config_hash(c)


@pytest.mark.parametrize(
    "override,message",
    [
        ({"points": [[0, 0, 0]]}, "zero spin vector"),
        ({"mass": -1}, "mass"),
        ({"quadrature.n_r": 1}, "quadrature.n_r"),
        ({"contour": {"shape": "circle", "theta": 0.0}}, "contour.theta"),
        ({"contour": {"shape": "polygon", "vertices": [[1, 0, 0]]}}, "vertices"),
        ({"contour": {"shape": "blob"}}, "contour.shape"),
        ({"adiabatic.durations": [100, 50]}, "increasing"),
        ({"adiabatic.steps": 10}, "adiabatic.steps"),
        ({"fd_step": 0.5}, "fd_step"),
        ({"output.format": "xml"}, "output.format"),
        ({"profile.shape": "box"}, "profile.shape"),
    ],
)
def test_validation_messages(override, message):
    with pytest.raises(ConfigError, match=message):
        config.load(overrides=override)


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"mas": 1.0}))
    with pytest.raises(ConfigError, match="unknown config key 'mas'"):
        config.load(path)


def test_wrong_format_tag(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"format": "spinberry-config/0"}))
    with pytest.raises(ConfigError, match="unsupported config format"):
        config.load(path)


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config"):
        config.load(tmp_path / "missing.json")


def test_scaled_count():
    cfg = config.load(overrides={"resolution_scale": 0.5})
    assert config.scaled_count(2000, cfg) == 1000
    assert config.scaled_count(4, cfg) == 3
