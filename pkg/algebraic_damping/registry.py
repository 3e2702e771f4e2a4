"""
Registration of named frequency models and perturbation families.
"""

import logging
from typing import Any, Dict, Optional, Type

from .errors import ConfigError
from .fields import (
    CompositeToy,
    CriticalToy,
    FrequencyModel,
    IsochroneCosCos,
    IsochroneModel,
    PerturbationSpec,
    ShiftedVertexToy,
    TangentToy,
    ToyFactorized,
    VertexToy,
)

logger = logging.getLogger(__name__)


class ModelRegistry:
    """Registry mapping names to model and perturbation classes."""

    def __init__(self):
        self._models: Dict[str, Type[FrequencyModel]] = {}
        self._perturbations: Dict[str, Type[PerturbationSpec]] = {}

    def register_model(self, name: str, model_class: type) -> None:
        """
        Register a frequency model class.

        Args:
            name: Model name used in configs and on the command line
            model_class: Class deriving from FrequencyModel
        """
        if not issubclass(model_class, FrequencyModel):
            raise ValueError(f"Model class {model_class} must inherit from FrequencyModel")
        self._models[name] = model_class
        logger.debug(f"Registered model: {name}")

    def register_perturbation(self, name: str, spec_class: type) -> None:
        """
        Register a perturbation family class.

        Args:
            name: Family name
            spec_class: Class deriving from PerturbationSpec
        """
        if not issubclass(spec_class, PerturbationSpec):
            raise ValueError(f"Perturbation class {spec_class} must inherit from PerturbationSpec")
        self._perturbations[name] = spec_class
        logger.debug(f"Registered perturbation family: {name}")

    def get_model_class(self, name: str) -> Optional[Type[FrequencyModel]]:
        return self._models.get(name)

    def create_model(self, name: str, **params: Any) -> FrequencyModel:
        """
        Instantiate a registered model.

        Args:
            name: Registered model name
            **params: Constructor parameters (e.g. G, M, b for the isochrone)

        Returns:
            Model instance
        """
        model_class = self._models.get(name)
        if model_class is None:
            raise ConfigError(f"Unknown model '{name}'. Available: {', '.join(sorted(self._models))}")
        try:
            return model_class(**params)
        except TypeError as e:
            raise ConfigError(f"Invalid parameters for model '{name}': {e}")

    def create_perturbation(self, name: str, **params: Any) -> PerturbationSpec:
        spec_class = self._perturbations.get(name)
        if spec_class is None:
            raise ConfigError(
                f"Unknown perturbation family '{name}'. Available: {', '.join(sorted(self._perturbations))}"
            )
        try:
            return spec_class(**params)
        except TypeError as e:
            raise ConfigError(f"Invalid parameters for perturbation '{name}': {e}")

    def list_models(self) -> Dict[str, str]:
        """
        List registered models with their descriptions.

        Returns:
            Dict of model names to descriptions
        """
        return {name: cls().description for name, cls in sorted(self._models.items())}

    def list_perturbations(self) -> Dict[str, str]:
        return {name: (cls.__doc__ or "").strip().splitlines()[0]
                for name, cls in sorted(self._perturbations.items())}


def _default_registry() -> ModelRegistry:
    registry = ModelRegistry()
    for cls in (VertexToy, ShiftedVertexToy, TangentToy, CriticalToy, CompositeToy, IsochroneModel):
        registry.register_model(cls().name, cls)
    registry.register_perturbation("toy-factorized", ToyFactorized)
    registry.register_perturbation("isochrone-cos-cos", IsochroneCosCos)
    return registry


# Global model registry instance
model_registry = _default_registry()
