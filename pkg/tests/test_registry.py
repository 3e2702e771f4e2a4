import pytest

from algebraic_damping.errors import ConfigError
from algebraic_damping.fields import IsochroneCosCos, IsochroneModel, ToyFactorized
from algebraic_damping.registry import ModelRegistry, model_registry


def test_default_models_registered():
    names = set(model_registry.list_models())
    assert names == {"vertex-toy", "shifted-vertex-toy", "tangent-toy", "critical-toy",
                     "composite-toy", "isochrone"}
    assert set(model_registry.list_perturbations()) == {"toy-factorized", "isochrone-cos-cos"}


def test_create_model_with_parameters():
    model = model_registry.create_model("isochrone", G=2.0, b=0.5)
    assert isinstance(model, IsochroneModel)
    assert model.gmb == pytest.approx(1.0)


def test_create_perturbation():
    spec = model_registry.create_perturbation("toy-factorized", h1=2, j1_star=1.0)
    assert spec == ToyFactorized(h1=2, j1_star=1.0)
    iso = model_registry.create_perturbation("isochrone-cos-cos", n2=2, n3=-1)
    assert isinstance(iso, IsochroneCosCos)


def test_unknown_names_raise_config_error():
    with pytest.raises(ConfigError, match="Unknown model"):
        model_registry.create_model("harmonic")
    with pytest.raises(ConfigError, match="Unknown perturbation"):
        model_registry.create_perturbation("gaussian")


def test_bad_parameters_raise_config_error():
    with pytest.raises(ConfigError):
        model_registry.create_model("vertex-toy", shift=1.0)


def test_register_rejects_foreign_classes():
    registry = ModelRegistry()
    with pytest.raises(ValueError):
        registry.register_model("dict", dict)
    with pytest.raises(ValueError):
        registry.register_perturbation("dict", dict)
