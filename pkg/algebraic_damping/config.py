"""
Run configuration: pydantic schema plus the YAML/JSON parser.
"""

import json
import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .analysis import Tolerances
from .errors import AlgebraicDampingError, ConfigError
from .evolve import MAX_BINS, MIN_BINS, QuadratureConfig
from .fields import (
    ActionDomain,
    FrequencyModel,
    IsochroneCosCos,
    IsochroneModel,
    Mode,
    Observable,
    Parity,
    PerturbationSpec,
)
from .registry import model_registry

logger = logging.getLogger(__name__)

THREADS_ENV = "ALGDAMP_THREADS"
ENV_REFERENCE = re.compile(r"\$\{(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?::(?P<default>[^}]*))?\}")

Number = Union[int, float]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelSection(_Section):
    name: str = Field("composite-toy", description="Registered frequency model")
    params: Dict[str, Number] = Field(default_factory=dict, description="Model parameters, e.g. G, M, b")


class PerturbationSection(_Section):
    name: Optional[str] = Field(None, description="Perturbation family; defaults to the model's natural one")
    params: Dict[str, Number] = Field(default_factory=dict, description="Family parameters")


class ObservableSection(_Section):
    label: Optional[str] = Field(None, description="Toy observable A1..A4")
    mode: Optional[Tuple[int, int]] = Field(None, description="Mode (m1, m2)")
    parity: Optional[Literal["cos", "sin"]] = Field(None, description="cos or sin of n.theta")

    @model_validator(mode="after")
    def _label_or_mode(self) -> "ObservableSection":
        if self.label is None and (self.mode is None or self.parity is None):
            raise ValueError("observable needs a label or both mode and parity")
        return self


class QuadratureSection(_Section):
    bins: int = Field(4096, description="Grid bins per action dimension, in [2^8, 2^14]")
    cutoff: Optional[float] = Field(None, description="Upper action cutoff; 10 for toys, 20 for the isochrone")
    j1_min: float = Field(0.0, description="Lower J1 edge")
    j2_min: float = Field(0.0, description="Lower J2 edge")
    tile_rows: int = Field(128, ge=1, description="Grid rows per summation tile")


class TimeSection(_Section):
    t0: float = Field(1.0, ge=0.0, description="First sample time")
    dt: float = Field(1.0, gt=0.0, description="Sample spacing")
    n_samples: int = Field(1000, ge=2, description="Number of samples")


class AnalysisSection(_Section):
    fit_window: Optional[Tuple[float, float]] = Field(None, description="Exponent fit window")
    spectrum_window: Optional[Tuple[float, float]] = Field(None, description="Spectrum window")
    exponent_tolerance: float = Field(0.1, gt=0.0)
    frequency_tolerance: float = Field(0.006, gt=0.0)
    zero_level: float = Field(1e-10, gt=0.0)
    cancelled_exponent: float = Field(4.5, gt=0.0)


class RunConfig(_Section):
    """Complete description of one analysis/evolution run."""
    model: ModelSection = Field(default_factory=ModelSection)
    perturbation: PerturbationSection = Field(default_factory=PerturbationSection)
    observables: List[ObservableSection] = Field(default_factory=list)
    quadrature: QuadratureSection = Field(default_factory=QuadratureSection)
    time: TimeSection = Field(default_factory=TimeSection)
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    threads: Optional[int] = Field(None, ge=1, description="Worker threads")
    seed: int = Field(0, description="Seed for randomly sampled check times")

    @classmethod
    def json_schema(cls) -> Dict[str, Any]:
        return cls.model_json_schema()

    @property
    def is_isochrone(self) -> bool:
        return self.model.name == IsochroneModel().name

    def create_model(self) -> FrequencyModel:
        return model_registry.create_model(self.model.name, **self.model.params)

    def create_perturbation(self, model: Optional[FrequencyModel] = None) -> PerturbationSpec:
        model = model or self.create_model()
        name = self.perturbation.name or ("isochrone-cos-cos" if isinstance(model, IsochroneModel)
                                          else "toy-factorized")
        params = dict(self.perturbation.params)
        if name == "isochrone-cos-cos":
            if not isinstance(model, IsochroneModel):
                raise ConfigError("isochrone-cos-cos perturbation requires the isochrone model")
            params["model"] = model
        return model_registry.create_perturbation(name, **params)

    def create_observables(self, spec: Optional[PerturbationSpec] = None) -> List[Observable]:
        """Configured observables; toy labels A1..A4 or the perturbation's own mode by default."""
        if self.observables:
            result = []
            for section in self.observables:
                if section.label is not None:
                    result.append(Observable.toy(section.label))
                else:
                    result.append(Observable(Mode(*section.mode), Parity(section.parity)))
            return result
        spec = spec or self.create_perturbation()
        if isinstance(spec, IsochroneCosCos):
            mode = Mode(spec.n2, spec.n3)
            return [Observable(mode, Parity.COS), Observable(mode, Parity.SIN)]
        return [Observable.toy(label) for label in ("A1", "A2", "A3", "A4")]

    def create_domain(self) -> ActionDomain:
        q = self.quadrature
        cutoff = q.cutoff if q.cutoff is not None else (20.0 if self.is_isochrone else 10.0)
        return ActionDomain(q.j1_min, cutoff, q.j2_min, cutoff, q.bins)

    def create_quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(self.create_domain(), tile_rows=self.quadrature.tile_rows)

    def fit_window(self) -> Tuple[float, float]:
        if self.analysis.fit_window is not None:
            return self.analysis.fit_window
        return (100.0, 1100.0) if self.is_isochrone else (100.0, 1000.0)

    def spectrum_window(self) -> Tuple[float, float]:
        if self.analysis.spectrum_window is not None:
            return self.analysis.spectrum_window
        return (77.0, 1100.0) if self.is_isochrone else (100.0, 1000.0)

    def tolerances(self) -> Tolerances:
        a = self.analysis
        return Tolerances(exponent=a.exponent_tolerance, frequency=a.frequency_tolerance,
                          zero_level=a.zero_level, cancelled_exponent=a.cancelled_exponent)


class ConfigParser:
    """Parses JSON or YAML run configurations."""

    @staticmethod
    def parse_config(config_path: Union[str, Path]) -> RunConfig:
        """
        Parse a configuration file.

        Args:
            config_path: Path to a .json file, or a YAML file with any other suffix

        Returns:
            Parsed RunConfig
        """
        path = Path(config_path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                if path.suffix.lower() == ".json":
                    config_data = json.load(f)
                else:
                    config_data = yaml.safe_load(f)
        except FileNotFoundError:
            raise ConfigError(f"Configuration file not found: {config_path}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON configuration: {e}")
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML configuration: {e}")

        config = ConfigParser.load_dict(config_data or {})
        logger.info(f"Loaded configuration from {path}: model={config.model.name}")
        return config

    @staticmethod
    def load_dict(data: Dict[str, Any]) -> RunConfig:
        """Validate a configuration mapping after environment substitution."""
        if not isinstance(data, dict):
            raise ConfigError("Configuration document must be a mapping")
        data = expand_env(data)
        try:
            return RunConfig.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {e}")

    @staticmethod
    def validate_config(config: RunConfig) -> List[str]:
        """
        Semantic checks the schema cannot express.

        Args:
            config: RunConfig to validate

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []

        bins = config.quadrature.bins
        if not MIN_BINS <= bins <= MAX_BINS:
            errors.append(f"quadrature.bins={bins} outside [{MIN_BINS}, {MAX_BINS}]")

        if config.is_isochrone and (config.quadrature.j1_min < 0 or config.quadrature.j2_min < 0):
            errors.append("isochrone actions must be non-negative (j1_min, j2_min >= 0)")

        for window_name, window in (("fit_window", config.analysis.fit_window),
                                    ("spectrum_window", config.analysis.spectrum_window)):
            if window is not None and not window[0] < window[1]:
                errors.append(f"analysis.{window_name} must satisfy start < end, got {list(window)}")

        for section in config.observables:
            if section.mode is not None and tuple(section.mode) == (0, 0):
                errors.append("observable mode (0,0) carries no dynamics")

        try:
            model = config.create_model()
            spec = config.create_perturbation(model)
        except AlgebraicDampingError as e:
            errors.append(str(e))
            return errors

        try:
            observables = config.create_observables(spec)
        except AlgebraicDampingError as e:
            errors.append(str(e))
            return errors
        for observable in observables:
            if not spec.supports(observable.n):
                errors.append(f"observable {observable.name} uses mode {observable.n} outside the "
                              f"support of {spec.name}")
        return errors


def _env_value(match: "re.Match[str]") -> str:
    name, default = match.group("name"), match.group("default")
    value = os.getenv(name)
    if value is not None:
        return value
    if default is not None:
        return default
    raise ConfigError(f"Environment variable '{name}' is not set and '{match.group(0)}' has no default")


def expand_env(data: Any) -> Any:
    """
    Replace ${VAR} and ${VAR:default} references throughout a parsed document.

    A string that is a single reference takes the YAML type of its value, so
    "${ALGDAMP_BINS:4096}" becomes the int 4096 in JSON and YAML files alike.
    A reference inside a longer string is spliced in as text.

    Raises:
        ConfigError: A referenced variable is unset and has no default
    """
    if isinstance(data, dict):
        return {key: expand_env(value) for key, value in data.items()}
    if isinstance(data, list):
        return [expand_env(item) for item in data]
    if not isinstance(data, str):
        return data
    whole = ENV_REFERENCE.fullmatch(data)
    if whole is not None:
        text = _env_value(whole)
        try:
            value = yaml.safe_load(text) if text.strip() else text
        except yaml.YAMLError:
            return text
        return value if isinstance(value, (bool, int, float)) else text
    return ENV_REFERENCE.sub(_env_value, data)


def resolve_threads(flag: Optional[int] = None, config: Optional[RunConfig] = None) -> int:
    """
    Worker count: --threads, then ALGDAMP_THREADS, then the config, then the CPU count.

    Args:
        flag: Value of --threads, if given
        config: Run configuration, if any

    Returns:
        Positive worker count
    """
    if flag is not None:
        if flag < 1:
            raise ConfigError(f"--threads must be positive, got {flag}")
        return flag
    env_value = os.getenv(THREADS_ENV)
    if env_value:
        try:
            threads = int(env_value)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got '{env_value}'")
        if threads < 1:
            raise ConfigError(f"{THREADS_ENV} must be positive, got {threads}")
        return threads
    if config is not None and config.threads is not None:
        return config.threads
    return os.cpu_count() or 1
