"""
Algebraic Damping

Singularity analysis and exact advection evolution for observables of
integrable Hamiltonian systems whose phase mixing decays as a power law.
"""

__version__ = "0.1.0"

from .atlas import classify, predict_damping, predict_observable, resolve_cancellation
from .evolve import QuadratureConfig, QuadratureScheduler, TimeSeries, evolve_series, expected_value
from .analysis import compare, fit_decay_exponent, power_spectrum, spectrum
from .fields import ActionDomain, Mode, Observable, Parity
from .registry import model_registry

__all__ = [
    "classify",
    "predict_damping",
    "predict_observable",
    "resolve_cancellation",
    "QuadratureConfig",
    "QuadratureScheduler",
    "TimeSeries",
    "evolve_series",
    "expected_value",
    "compare",
    "fit_decay_exponent",
    "power_spectrum",
    "spectrum",
    "ActionDomain",
    "Mode",
    "Observable",
    "Parity",
    "model_registry",
]
