import json
from pathlib import Path

import pytest

from algebraic_damping.config import ConfigParser, RunConfig, expand_env, resolve_threads
from algebraic_damping.errors import ConfigError
from algebraic_damping.fields import IsochroneModel, Mode, Observable, Parity, TangentToy

YAML_CONFIG = """
model:
  name: isochrone
  params:
    G: 1.0
    b: 1.0
threads: "${ALGDAMP_TEST_THREADS:3}"
quadrature:
  bins: 512
"""


def test_yaml_config_with_env_default(tmp_path, monkeypatch):
    monkeypatch.delenv("ALGDAMP_TEST_THREADS", raising=False)
    path = tmp_path / "run.yaml"
    path.write_text(YAML_CONFIG)
    config = ConfigParser.parse_config(path)
    assert config.threads == 3
    assert isinstance(config.create_model(), IsochroneModel)
    assert config.create_domain().j1_max == 20.0
    assert config.fit_window() == (100.0, 1100.0)
    assert config.spectrum_window() == (77.0, 1100.0)
    observables = config.create_observables()
    assert [o.parity for o in observables] == [Parity.COS, Parity.SIN]
    assert all(o.n == Mode(1, 1) for o in observables)
    assert ConfigParser.validate_config(config) == []


def test_yaml_config_with_env_value(tmp_path, monkeypatch):
    monkeypatch.setenv("ALGDAMP_TEST_THREADS", "5")
    path = tmp_path / "run.yml"
    path.write_text(YAML_CONFIG)
    assert ConfigParser.parse_config(path).threads == 5


def test_whole_reference_takes_yaml_type(monkeypatch):
    monkeypatch.delenv("ALGDAMP_TEST_BINS", raising=False)
    monkeypatch.setenv("ALGDAMP_TEST_B", "2.5")
    data = expand_env({
        "quadrature": {"bins": "${ALGDAMP_TEST_BINS:512}"},
        "model": {"params": {"b": "${ALGDAMP_TEST_B}"}},
        "tag": "run-${ALGDAMP_TEST_BINS:512}",
        "window": ["${ALGDAMP_TEST_BINS:100}", 1000],
    })
    assert data["quadrature"]["bins"] == 512 and isinstance(data["quadrature"]["bins"], int)
    assert data["model"]["params"]["b"] == 2.5
    assert data["tag"] == "run-512"
    assert data["window"] == [100, 1000]


def test_env_reference_without_default_must_be_set(tmp_path, monkeypatch):
    monkeypatch.delenv("ALGDAMP_TEST_UNSET", raising=False)
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"quadrature": {"bins": "${ALGDAMP_TEST_UNSET}"}}))
    with pytest.raises(ConfigError, match="ALGDAMP_TEST_UNSET"):
        ConfigParser.parse_config(path)
    monkeypatch.setenv("ALGDAMP_TEST_UNSET", "1024")
    assert ConfigParser.parse_config(path).quadrature.bins == 1024


def test_json_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "model": {"name": "tangent-toy"},
        "perturbation": {"params": {"h1": 2, "j1_star": 1.0}},
        "observables": [{"label": "A1"}, {"mode": [1, -1], "parity": "sin"}],
        "time": {"t0": 1.0, "dt": 0.5, "n_samples": 10},
    }))
    config = ConfigParser.parse_config(path)
    assert isinstance(config.create_model(), TangentToy)
    assert config.create_perturbation().h1 == 2
    assert config.create_observables() == [Observable.toy("A1"), Observable(Mode(1, -1), Parity.SIN)]
    assert config.create_domain().j1_max == 10.0
    assert config.fit_window() == (100.0, 1000.0)
    assert ConfigParser.validate_config(config) == []


def test_default_observables_are_toy_labels():
    config = RunConfig()
    assert [o.name for o in config.create_observables()] == ["A1", "A2", "A3", "A4"]


@pytest.mark.parametrize("data", [
    {"modell": {}},
    {"observables": [{"parity": "cos"}]},
    {"time": {"dt": 0.0}},
    {"threads": 0},
])
def test_schema_errors(data):
    with pytest.raises(ConfigError):
        ConfigParser.load_dict(data)


def test_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        ConfigParser.parse_config(tmp_path / "missing.yaml")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        ConfigParser.parse_config(broken)


def test_semantic_validation():
    config = ConfigParser.load_dict({
        "quadrature": {"bins": 100},
        "analysis": {"fit_window": [500, 100]},
        "observables": [{"mode": [2, 1], "parity": "cos"}],
    })
    errors = ConfigParser.validate_config(config)
    assert any("quadrature.bins=100" in e for e in errors)
    assert any("fit_window" in e for e in errors)
    assert any("outside the support" in e for e in errors)


def test_validation_reports_bad_model_and_family():
    unknown = ConfigParser.load_dict({"model": {"name": "kepler"}})
    assert any("Unknown model" in e for e in ConfigParser.validate_config(unknown))
    mismatched = ConfigParser.load_dict({"perturbation": {"name": "isochrone-cos-cos"}})
    assert any("requires the isochrone model" in e for e in ConfigParser.validate_config(mismatched))


def test_isochrone_negative_actions_rejected():
    config = ConfigParser.load_dict({"model": {"name": "isochrone"}, "quadrature": {"j1_min": -1.0}})
    assert any("non-negative" in e for e in ConfigParser.validate_config(config))


def test_json_schema_lists_sections():
    schema = RunConfig.json_schema()
    assert {"model", "perturbation", "observables", "quadrature", "time", "analysis"} <= set(schema["properties"])


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("ALGDAMP_THREADS", raising=False)
    assert resolve_threads(4) == 4
    with pytest.raises(ConfigError):
        resolve_threads(0)
    assert resolve_threads(None, RunConfig(threads=6)) == 6
    monkeypatch.setenv("ALGDAMP_THREADS", "2")
    assert resolve_threads(None, RunConfig(threads=6)) == 2
    monkeypatch.setenv("ALGDAMP_THREADS", "many")
    with pytest.raises(ConfigError):
        resolve_threads()


@pytest.mark.parametrize("name", ["example_config.yaml", "example_toy_config.json"])
def test_shipped_examples_validate(name, monkeypatch):
    monkeypatch.delenv("ALGDAMP_BINS", raising=False)
    monkeypatch.delenv("ALGDAMP_THREADS", raising=False)
    config = ConfigParser.parse_config(Path(__file__).resolve().parents[1] / name)
    assert ConfigParser.validate_config(config) == []
    assert config.quadrature.bins == 4096
