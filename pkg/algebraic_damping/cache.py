"""
Grid-field cache shared by quadrature workers.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass
from threading import Lock
from typing import Any, Callable, Dict, Hashable, Tuple

import numpy as np

from .fields import FrequencyModel, Mode, PerturbationSpec

logger = logging.getLogger(__name__)

EFFECTIVE_SUPPORT = 1e-12


@dataclass(frozen=True)
class QuadratureFields:
    """Read-only phase and weight grids for one (model, spec, mode, grid)."""
    phase: np.ndarray
    weight: np.ndarray
    cell_area: float
    t_max: float
    tile_rows: int

    @property
    def n_tiles(self) -> int:
        return -(-self.phase.shape[0] // self.tile_rows)

    def tile(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        start = index * self.tile_rows
        stop = start + self.tile_rows
        return self.phase[start:stop], self.weight[start:stop]


def _read_only(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _tiled(func: Callable, j1: np.ndarray, j2: np.ndarray, tile_rows: int) -> np.ndarray:
    out = np.empty((j1.size, j2.size))
    for start in range(0, j1.size, tile_rows):
        out[start:start + tile_rows] = func(j1[start:start + tile_rows, None], j2[None, :])
    return out


class PhaseFieldCache:
    """LRU store of grid fields; entries are immutable once built."""

    def __init__(self, max_entries: int = 8):
        """
        Initialize the cache.

        Args:
            max_entries: Number of arrays kept before the oldest is evicted
        """
        self._entries: "OrderedDict[Hashable, Any]" = OrderedDict()
        self._max_entries = max_entries
        self._lock = Lock()
        self.hits = 0
        self.misses = 0

    def _get_or_build(self, key: Hashable, build: Callable[[], Any]) -> Any:
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
                self.hits += 1
                return self._entries[key]
            self.misses += 1
            value = build()
            self._entries[key] = value
            while len(self._entries) > self._max_entries:
                evicted, _ = self._entries.popitem(last=False)
                logger.debug(f"Evicted cache entry {evicted[0]}")
            return value

    def phase(self, model: FrequencyModel, mode: Mode, quad) -> np.ndarray:
        """mu = m . Omega on the midpoint grid."""
        def build():
            j1, j2 = quad.domain.nodes()
            model.check_domain(j1[0], j2[0])
            logger.debug(f"Building phase field for {model.name} mode {mode} on {quad.bins}^2 grid")
            return _read_only(_tiled(lambda a, b: model.mode_frequency(mode, a, b), j1, j2, quad.tile_rows))
        return self._get_or_build(("phase", model, mode, quad.key()), build)

    def weight(self, spec: PerturbationSpec, mode: Mode, quad) -> np.ndarray:
        """Quadrature weight of the perturbation on the midpoint grid."""
        def build():
            j1, j2 = quad.domain.nodes()
            logger.debug(f"Building weight field for {spec.name} mode {mode} on {quad.bins}^2 grid")
            return _read_only(_tiled(lambda a, b: spec.weight(mode, a, b), j1, j2, quad.tile_rows))
        return self._get_or_build(("weight", spec, mode, quad.key()), build)

    def t_max(self, model: FrequencyModel, spec: PerturbationSpec, mode: Mode, quad) -> float:
        """Largest resolved time bins / (extent * max|grad mu|) over the weight's support."""
        # weight is fetched first: _get_or_build holds the lock while building
        weight = self.weight(spec, mode, quad)
        return self._get_or_build(("t_max", model, spec, mode, quad.key()),
                                  lambda: _resolved_time(model, mode, quad, weight))

    def fields(self, model: FrequencyModel, spec: PerturbationSpec, mode: Mode, quad) -> QuadratureFields:
        phase = self.phase(model, mode, quad)
        weight = self.weight(spec, mode, quad)
        return QuadratureFields(phase, weight, quad.domain.cell_area,
                                self.t_max(model, spec, mode, quad), quad.tile_rows)

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()

    def stats(self) -> Dict[str, int]:
        with self._lock:
            return {"entries": len(self._entries), "hits": self.hits, "misses": self.misses}


def _resolved_time(model: FrequencyModel, mode: Mode, quad, weight: np.ndarray) -> float:
    j1, j2 = quad.domain.nodes()
    threshold = EFFECTIVE_SUPPORT * float(np.abs(weight).max())
    max_grad = 0.0
    for start in range(0, j1.size, quad.tile_rows):
        rows = slice(start, start + quad.tile_rows)
        support = np.abs(weight[rows]) > threshold
        if not np.any(support):
            continue
        grad = model.mode_gradient(mode, j1[rows, None], j2[None, :])
        steepest = np.maximum(np.abs(grad[0]), np.abs(grad[1]))
        max_grad = max(max_grad, float(np.broadcast_to(steepest, support.shape)[support].max()))
    domain = quad.domain
    extent = max(domain.j1_max - domain.j1_min, domain.j2_max - domain.j2_min)
    if max_grad == 0.0:
        return float("inf")
    return quad.bins / (extent * max_grad)
