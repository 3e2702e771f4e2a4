"""
Exact evolution of observable expectations under the advection equation.

The angular integrals are done analytically, so an expectation at time t is the
2D action integral of weight(J) * trig(t * m.Omega(J)), evaluated with the
midpoint rule on the grid of a QuadratureConfig.
"""

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .cache import PhaseFieldCache, QuadratureFields
from .errors import AnalysisError, DomainError
from .fields import ActionDomain, FrequencyModel, Observable, Parity, PerturbationSpec

logger = logging.getLogger(__name__)

MIN_BINS = 2 ** 8
MAX_BINS = 2 ** 14
TILE_ROWS = 128


@dataclass(frozen=True)
class QuadratureConfig:
    """Midpoint grid plus the fixed tile partition used for summation."""
    domain: ActionDomain
    deterministic: bool = True
    tile_rows: int = TILE_ROWS

    def __post_init__(self):
        if not MIN_BINS <= self.bins <= MAX_BINS:
            raise DomainError(f"bins_per_dim must lie in [{MIN_BINS}, {MAX_BINS}], got {self.bins}")
        if self.tile_rows < 1:
            raise DomainError(f"tile_rows must be positive, got {self.tile_rows}")

    @classmethod
    def toy(cls, bins: int = 2 ** 12, cutoff: float = 10.0) -> "QuadratureConfig":
        return cls(ActionDomain.toy(bins, cutoff))

    @classmethod
    def isochrone(cls, bins: int = 2 ** 12, cutoff: float = 20.0) -> "QuadratureConfig":
        return cls(ActionDomain.isochrone(bins, cutoff))

    @classmethod
    def for_model(cls, model: FrequencyModel, bins: int = 2 ** 12) -> "QuadratureConfig":
        return cls(model.default_domain(bins))

    @property
    def bins(self) -> int:
        return self.domain.bins_per_dim

    def key(self) -> Tuple:
        return self.domain.key() + (self.tile_rows,)

    def to_dict(self) -> Dict[str, Any]:
        return {"domain": self.domain.to_dict(), "deterministic": self.deterministic,
                "tile_rows": self.tile_rows}


@dataclass(frozen=True)
class Sample:
    """One expected value with its resolution flag."""
    t: float
    value: float
    under_resolved: bool = False


@dataclass
class TimeSeries:
    """Uniformly sampled real series starting at t0 with step dt."""
    t0: float
    dt: float
    values: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)
    under_resolved: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise AnalysisError("TimeSeries values must be one-dimensional")
        if not self.dt > 0:
            raise AnalysisError(f"TimeSeries dt must be positive, got {self.dt}")
        if self.values.size < 2:
            raise AnalysisError(f"TimeSeries needs at least 2 samples, got {self.values.size}")
        if self.under_resolved is None:
            self.under_resolved = np.zeros(self.values.size, dtype=bool)
        else:
            self.under_resolved = np.asarray(self.under_resolved, dtype=bool)

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.values.size - 1)

    def window(self, t_min: float, t_max: float) -> Tuple[np.ndarray, np.ndarray]:
        """Samples with t_min <= t <= t_max (a small slack absorbs float drift in t)."""
        times = self.times
        slack = 1e-9 * self.dt
        mask = (times >= t_min - slack) & (times <= t_max + slack)
        return times[mask], self.values[mask]

    @property
    def n_under_resolved(self) -> int:
        return int(np.count_nonzero(self.under_resolved))


def _check_observable(spec: PerturbationSpec, observable: Observable) -> None:
    if not spec.supports(observable.n):
        raise DomainError(f"Perturbation {spec.name} has no Fourier coefficient at mode {observable.n}")


def _tile_sum(fields: QuadratureFields, index: int, parity: Parity, t: float) -> float:
    phase, weight = fields.tile(index)
    trig = np.cos if parity is Parity.COS else np.sin
    return float(np.sum(weight * trig(phase * t)))


def _integrate(fields: QuadratureFields, parity: Parity, t: float) -> float:
    partial = [_tile_sum(fields, i, parity, t) for i in range(fields.n_tiles)]
    return math.fsum(partial) * fields.cell_area


class QuadratureScheduler:
    """Runs grid quadratures on a worker pool; results never depend on the pool size."""

    def __init__(self, max_workers: Optional[int] = None, cache: Optional[PhaseFieldCache] = None):
        """
        Initialize the scheduler.

        Args:
            max_workers: Worker threads (defaults to the number of CPUs)
            cache: Field cache shared between calls
        """
        self.max_workers = max_workers or os.cpu_count() or 1
        self.cache = cache if cache is not None else PhaseFieldCache()
        self.executor = ThreadPoolExecutor(max_workers=self.max_workers)

    def __enter__(self) -> "QuadratureScheduler":
        return self

    def __exit__(self, *exc) -> None:
        self.shutdown()

    def shutdown(self) -> None:
        self.executor.shutdown(wait=True)

    def expected_value(self,
                       model: FrequencyModel,
                       spec: PerturbationSpec,
                       observable: Observable,
                       t: float,
                       quad: QuadratureConfig) -> Sample:
        """
        Expectation of an observable at time t.

        Args:
            model: Frequency model
            spec: Initial perturbation
            observable: cos or sin of n.theta
            t: Time, t >= 0
            quad: Quadrature grid

        Returns:
            Sample carrying the value and its under-resolution flag
        """
        if t < 0:
            raise DomainError(f"Time must be non-negative, got {t}")
        _check_observable(spec, observable)
        fields = self.cache.fields(model, spec, observable.n, quad)
        partial = list(self.executor.map(
            lambda i: _tile_sum(fields, i, observable.parity, t), range(fields.n_tiles)))
        value = math.fsum(partial) * fields.cell_area
        flagged = t > fields.t_max
        if flagged:
            logger.warning(f"t={t} exceeds resolved time {fields.t_max:.4g} for "
                           f"{observable.name} on {quad.bins}^2 grid")
        return Sample(float(t), value, flagged)

    def evolve_series(self,
                      model: FrequencyModel,
                      spec: PerturbationSpec,
                      observable: Observable,
                      t0: float,
                      dt: float,
                      n_samples: int,
                      quad: QuadratureConfig) -> TimeSeries:
        """
        Evaluate an observable on the uniform time grid t0 + k*dt.

        The phase and weight grids are built once and shared read-only by all
        time samples.
        """
        if t0 < 0:
            raise DomainError(f"t0 must be non-negative, got {t0}")
        if not dt > 0:
            raise DomainError(f"dt must be positive, got {dt}")
        if n_samples < 2:
            raise DomainError(f"n_samples must be at least 2, got {n_samples}")
        _check_observable(spec, observable)

        start_time = time.time()
        fields = self.cache.fields(model, spec, observable.n, quad)
        times = t0 + dt * np.arange(n_samples)
        values = list(self.executor.map(lambda t: _integrate(fields, observable.parity, float(t)), times))
        flags = times > fields.t_max

        series = TimeSeries(
            t0=float(t0),
            dt=float(dt),
            values=np.array(values),
            metadata={
                "model": model.to_dict(),
                "perturbation": spec.to_dict(),
                "observable": observable.to_dict(),
                "quadrature": quad.to_dict(),
                "t_max_resolved": fields.t_max,
            },
            under_resolved=flags,
        )
        if series.n_under_resolved:
            logger.warning(f"{series.n_under_resolved}/{n_samples} samples of {observable.name} "
                           f"lie beyond the resolved time {fields.t_max:.4g}")
        logger.info(f"Computed {n_samples} samples of {observable.name} for {model.name} "
                    f"in {time.time() - start_time:.2f}s")
        return series


def expected_value(model: FrequencyModel,
                   spec: PerturbationSpec,
                   observable: Observable,
                   t: float,
                   quad: QuadratureConfig,
                   scheduler: Optional[QuadratureScheduler] = None) -> Sample:
    """Module-level wrapper; uses a short-lived single-worker scheduler when none is given."""
    if scheduler is not None:
        return scheduler.expected_value(model, spec, observable, t, quad)
    with QuadratureScheduler(max_workers=1) as own:
        return own.expected_value(model, spec, observable, t, quad)


def evolve_series(model: FrequencyModel,
                  spec: PerturbationSpec,
                  observable: Observable,
                  t0: float,
                  dt: float,
                  n_samples: int,
                  quad: QuadratureConfig,
                  scheduler: Optional[QuadratureScheduler] = None) -> TimeSeries:
    if scheduler is not None:
        return scheduler.evolve_series(model, spec, observable, t0, dt, n_samples, quad)
    with QuadratureScheduler() as own:
        return own.evolve_series(model, spec, observable, t0, dt, n_samples, quad)
