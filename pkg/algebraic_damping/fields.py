"""
Action domains, frequency models, stationary states and initial perturbations.

Isochrone coordinates: every isochrone-facing API in this package uses
artifact actions (J1, J2) = (L, J_r), where L is the total angular momentum
(J_theta + |J_psi|) and J_r the radial action. Frequencies are returned in the
same order, (Omega_angular, Omega_radial), and modes (m1, m2) multiply them in
that order.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from .errors import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Position tolerance used to decide whether a point sits on an envelope zero.
_POINT_TOL = 1e-12


class Edge(Enum):
    """Boundary edges of a rectangular action domain."""
    J1_MIN = "j1_min"
    J1_MAX = "j1_max"
    J2_MIN = "j2_min"
    J2_MAX = "j2_max"

    @property
    def fixed_axis(self) -> int:
        """Index of the action held constant along the edge."""
        return 0 if self in (Edge.J1_MIN, Edge.J1_MAX) else 1

    @property
    def tangent_axis(self) -> int:
        """Index of the action that varies along the edge."""
        return 1 - self.fixed_axis


@dataclass(frozen=True)
class ActionDomain:
    """Rectangular action domain discretized by a uniform midpoint grid."""
    j1_min: float
    j1_max: float
    j2_min: float
    j2_max: float
    bins_per_dim: int = 4096
    cutoff_edges: Tuple[Edge, ...] = (Edge.J1_MAX, Edge.J2_MAX)

    def __post_init__(self):
        if not self.j1_min < self.j1_max:
            raise DomainError(f"j1_min ({self.j1_min}) must be below j1_max ({self.j1_max})")
        if not self.j2_min < self.j2_max:
            raise DomainError(f"j2_min ({self.j2_min}) must be below j2_max ({self.j2_max})")
        if self.bins_per_dim < 2:
            raise DomainError(f"bins_per_dim must be at least 2, got {self.bins_per_dim}")
        object.__setattr__(self, "cutoff_edges", tuple(sorted(set(self.cutoff_edges), key=lambda e: e.value)))

    @classmethod
    def toy(cls, bins_per_dim: int = 4096, cutoff: float = 10.0) -> "ActionDomain":
        """Quarter plane [0, cutoff]^2 used by the toy models."""
        return cls(0.0, cutoff, 0.0, cutoff, bins_per_dim)

    @classmethod
    def isochrone(cls, bins_per_dim: int = 4096, cutoff: float = 20.0) -> "ActionDomain":
        """Quarter plane [0, cutoff]^2 in (L, J_r)."""
        return cls(0.0, cutoff, 0.0, cutoff, bins_per_dim)

    def with_bins(self, bins_per_dim: int) -> "ActionDomain":
        return ActionDomain(self.j1_min, self.j1_max, self.j2_min, self.j2_max,
                            bins_per_dim, self.cutoff_edges)

    @property
    def widths(self) -> Tuple[float, float]:
        return ((self.j1_max - self.j1_min) / self.bins_per_dim,
                (self.j2_max - self.j2_min) / self.bins_per_dim)

    @property
    def cell_area(self) -> float:
        w1, w2 = self.widths
        return w1 * w2

    @property
    def is_truncated(self) -> bool:
        """True if some edge truncates an infinite domain."""
        return bool(self.cutoff_edges)

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Midpoint nodes along J1 and J2."""
        w1, w2 = self.widths
        idx = np.arange(self.bins_per_dim, dtype=float) + 0.5
        return self.j1_min + w1 * idx, self.j2_min + w2 * idx

    def edge_value(self, edge: Edge) -> float:
        return {
            Edge.J1_MIN: self.j1_min,
            Edge.J1_MAX: self.j1_max,
            Edge.J2_MIN: self.j2_min,
            Edge.J2_MAX: self.j2_max,
        }[edge]

    def edge_span(self, edge: Edge) -> Tuple[float, float]:
        """Range of the varying action along an edge."""
        if edge.tangent_axis == 0:
            return self.j1_min, self.j1_max
        return self.j2_min, self.j2_max

    def edge_point(self, edge: Edge, s: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
        """Point(s) on an edge parametrized by the varying action s."""
        fixed = self.edge_value(edge)
        if edge.fixed_axis == 0:
            return np.full_like(np.asarray(s, dtype=float), fixed), s
        return s, np.full_like(np.asarray(s, dtype=float), fixed)

    def physical_edges(self) -> List[Edge]:
        return [e for e in Edge if e not in self.cutoff_edges]

    def corners(self) -> List[Tuple[Tuple[float, float], Edge, Edge]]:
        """Corners where both incident edges are physical boundaries."""
        result = []
        for e1 in (Edge.J1_MIN, Edge.J1_MAX):
            for e2 in (Edge.J2_MIN, Edge.J2_MAX):
                if e1 in self.cutoff_edges or e2 in self.cutoff_edges:
                    continue
                result.append(((self.edge_value(e1), self.edge_value(e2)), e1, e2))
        return result

    def contains(self, j1: float, j2: float) -> bool:
        return self.j1_min <= j1 <= self.j1_max and self.j2_min <= j2 <= self.j2_max

    def key(self) -> Tuple:
        return (self.j1_min, self.j1_max, self.j2_min, self.j2_max, self.bins_per_dim,
                tuple(e.value for e in self.cutoff_edges))

    def to_dict(self) -> dict:
        return {
            "j1_min": self.j1_min,
            "j1_max": self.j1_max,
            "j2_min": self.j2_min,
            "j2_max": self.j2_max,
            "bins_per_dim": self.bins_per_dim,
            "cutoff_edges": [e.value for e in self.cutoff_edges],
        }


@dataclass(frozen=True)
class Mode:
    """Integer Fourier mode (m1, m2); the zero mode carries no dynamics."""
    m1: int
    m2: int

    def __post_init__(self):
        if self.m1 == 0 and self.m2 == 0:
            raise DomainError("Mode (0,0) carries no dynamics")

    @classmethod
    def parse(cls, text: str) -> "Mode":
        """Parse 'm1,m2'."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise DomainError(f"Mode must be written as 'm1,m2', got '{text}'")
        try:
            return cls(int(parts[0]), int(parts[1]))
        except ValueError:
            raise DomainError(f"Mode components must be integers, got '{text}'")

    def negated(self) -> "Mode":
        return Mode(-self.m1, -self.m2)

    def as_tuple(self) -> Tuple[int, int]:
        return self.m1, self.m2

    def __str__(self) -> str:
        return f"{self.m1},{self.m2}"


class Parity(Enum):
    COS = "cos"
    SIN = "sin"


@dataclass(frozen=True)
class Observable:
    """A(theta) = cos(n.theta) or sin(n.theta)."""
    n: Mode
    parity: Parity
    label: Optional[str] = None

    @classmethod
    def toy(cls, label: str) -> "Observable":
        """The four toy observables A1..A4."""
        try:
            mode, parity = _TOY_OBSERVABLES[label.upper()]
        except KeyError:
            raise DomainError(f"Unknown toy observable '{label}', expected A1..A4")
        return cls(Mode(*mode), parity, label.upper())

    @property
    def name(self) -> str:
        return self.label or f"{self.parity.value}({self.n})"

    def to_dict(self) -> dict:
        return {"name": self.name, "mode": list(self.n.as_tuple()), "parity": self.parity.value}


_TOY_OBSERVABLES = {
    "A1": ((1, 1), Parity.COS),
    "A2": ((1, 1), Parity.SIN),
    "A3": ((1, -1), Parity.COS),
    "A4": ((1, -1), Parity.SIN),
}


def _shape(j1: ArrayLike, j2: ArrayLike) -> Tuple[int, ...]:
    return np.broadcast(np.asarray(j1), np.asarray(j2)).shape


class FrequencyModel(ABC):
    """Closed-form frequency field Omega(J) with analytic derivatives."""

    decays_at_infinity: bool = False

    @property
    @abstractmethod
    def name(self) -> str:
        """Registry name."""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """Human readable description."""
        pass

    @abstractmethod
    def omega(self, j1: ArrayLike, j2: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        """Frequency components (Omega1, Omega2)."""
        pass

    @abstractmethod
    def jacobian(self, j1: ArrayLike, j2: ArrayLike) -> np.ndarray:
        """d Omega_i / d J_k, shape (2, 2, ...)."""
        pass

    @abstractmethod
    def hessian(self, j1: ArrayLike, j2: ArrayLike) -> np.ndarray:
        """d^2 Omega_i / d J_k d J_l, shape (2, 2, 2, ...)."""
        pass

    def check_domain(self, j1: ArrayLike, j2: ArrayLike) -> None:
        """Raise DomainError when J leaves the natural domain."""
        pass

    def default_domain(self, bins_per_dim: int = 4096) -> ActionDomain:
        return ActionDomain.toy(bins_per_dim)

    def mode_frequency(self, mode: Mode, j1: ArrayLike, j2: ArrayLike) -> np.ndarray:
        """mu(J) = m . Omega(J)."""
        o1, o2 = self.omega(j1, j2)
        return mode.m1 * o1 + mode.m2 * o2

    def mode_gradient(self, mode: Mode, j1: ArrayLike, j2: ArrayLike) -> np.ndarray:
        """Gradient of mu, shape (2, ...)."""
        jac = self.jacobian(j1, j2)
        return mode.m1 * jac[0] + mode.m2 * jac[1]

    def mode_hessian(self, mode: Mode, j1: ArrayLike, j2: ArrayLike) -> np.ndarray:
        """Hessian of mu, shape (2, 2, ...)."""
        hess = self.hessian(j1, j2)
        return mode.m1 * hess[0] + mode.m2 * hess[1]

    def to_dict(self) -> dict:
        return {"name": self.name}


@dataclass(frozen=True)
class VertexToy(FrequencyModel):
    """Omega = (J1, J2)."""

    @property
    def name(self) -> str:
        return "vertex-toy"

    @property
    def description(self) -> str:
        return "Linear frequencies; vertex singularity at the origin"

    def omega(self, j1, j2):
        j1, j2 = np.broadcast_arrays(np.asarray(j1, dtype=float), np.asarray(j2, dtype=float))
        return j1.copy(), j2.copy()

    def jacobian(self, j1, j2):
        shape = _shape(j1, j2)
        jac = np.zeros((2, 2) + shape)
        jac[0, 0] = 1.0
        jac[1, 1] = 1.0
        return jac

    def hessian(self, j1, j2):
        return np.zeros((2, 2, 2) + _shape(j1, j2))


@dataclass(frozen=True)
class ShiftedVertexToy(FrequencyModel):
    """Omega = (J1 + shift, J2); moves the vertex frequency off zero."""
    shift: float = 1.0

    @property
    def name(self) -> str:
        return "shifted-vertex-toy"

    @property
    def description(self) -> str:
        return "Linear frequencies with Omega1 offset; vertex at nonzero frequency"

    def omega(self, j1, j2):
        j1, j2 = np.broadcast_arrays(np.asarray(j1, dtype=float), np.asarray(j2, dtype=float))
        return j1 + self.shift, j2.copy()

    def jacobian(self, j1, j2):
        return VertexToy().jacobian(j1, j2)

    def hessian(self, j1, j2):
        return np.zeros((2, 2, 2) + _shape(j1, j2))

    def to_dict(self) -> dict:
        return {"name": self.name, "shift": self.shift}


@dataclass(frozen=True)
class TangentToy(FrequencyModel):
    """Omega = ((J1 - 1)^2, J2)."""

    @property
    def name(self) -> str:
        return "tangent-toy"

    @property
    def description(self) -> str:
        return "Vertex at the origin, tangent singularity at (1, 0)"

    def omega(self, j1, j2):
        j1, j2 = np.broadcast_arrays(np.asarray(j1, dtype=float), np.asarray(j2, dtype=float))
        return (j1 - 1.0) ** 2, j2.copy()

    def jacobian(self, j1, j2):
        j1 = np.asarray(j1, dtype=float)
        jac = np.zeros((2, 2) + _shape(j1, j2))
        jac[0, 0] = 2.0 * (j1 - 1.0)
        jac[1, 1] = 1.0
        return jac

    def hessian(self, j1, j2):
        hess = np.zeros((2, 2, 2) + _shape(j1, j2))
        hess[0, 0, 0] = 2.0
        return hess


@dataclass(frozen=True)
class CriticalToy(FrequencyModel):
    """Omega = ((J1 - 1)^2, (J2 - 1)^2)."""

    @property
    def name(self) -> str:
        return "critical-toy"

    @property
    def description(self) -> str:
        return "Vertex, two tangents and a critical point at (1, 1)"

    def omega(self, j1, j2):
        j1, j2 = np.broadcast_arrays(np.asarray(j1, dtype=float), np.asarray(j2, dtype=float))
        return (j1 - 1.0) ** 2, (j2 - 1.0) ** 2

    def jacobian(self, j1, j2):
        j1 = np.asarray(j1, dtype=float)
        j2 = np.asarray(j2, dtype=float)
        jac = np.zeros((2, 2) + _shape(j1, j2))
        jac[0, 0] = 2.0 * (j1 - 1.0)
        jac[1, 1] = 2.0 * (j2 - 1.0)
        return jac

    def hessian(self, j1, j2):
        hess = np.zeros((2, 2, 2) + _shape(j1, j2))
        hess[0, 0, 0] = 2.0
        hess[1, 1, 1] = 2.0
        return hess


@dataclass(frozen=True)
class CompositeToy(FrequencyModel):
    """Omega = (-J1 - J1^2/2 - 2 J2, -2 J1 + 2 J2)."""

    @property
    def name(self) -> str:
        return "composite-toy"

    @property
    def description(self) -> str:
        return "Vertex and tangent for (1,-1), line on the J1 = 0 edge for (1,1)"

    def omega(self, j1, j2):
        j1, j2 = np.broadcast_arrays(np.asarray(j1, dtype=float), np.asarray(j2, dtype=float))
        return -j1 - 0.5 * j1 ** 2 - 2.0 * j2, -2.0 * j1 + 2.0 * j2

    def jacobian(self, j1, j2):
        j1 = np.asarray(j1, dtype=float)
        jac = np.zeros((2, 2) + _shape(j1, j2))
        jac[0, 0] = -1.0 - j1
        jac[0, 1] = -2.0
        jac[1, 0] = -2.0
        jac[1, 1] = 2.0
        return jac

    def hessian(self, j1, j2):
        hess = np.zeros((2, 2, 2) + _shape(j1, j2))
        hess[0, 0, 0] = -1.0
        return hess


@dataclass(frozen=True)
class IsochroneModel(FrequencyModel):
    """
    Isochrone potential in artifact actions (L, J_r).

    H = -(GM)^2 / (2 D^2) with D = J_r + (L + sqrt(L^2 + 4GMb)) / 2,
    Omega_radial = (GM)^2 / D^3 and Omega_angular = r(L) Omega_radial with
    r(L) = (1 + L / sqrt(L^2 + 4GMb)) / 2.
    """
    G: float = 1.0
    M: float = 1.0
    b: float = 1.0

    decays_at_infinity = True

    def __post_init__(self):
        for label, value in (("G", self.G), ("M", self.M), ("b", self.b)):
            if not value > 0:
                raise DomainError(f"Isochrone parameter {label} must be positive, got {value}")

    @property
    def name(self) -> str:
        return "isochrone"

    @property
    def description(self) -> str:
        return f"Isochrone potential (G={self.G}, M={self.M}, b={self.b}) in actions (L, J_r)"

    @property
    def gm(self) -> float:
        return self.G * self.M

    @property
    def gmb(self) -> float:
        return self.G * self.M * self.b

    def check_domain(self, j1, j2) -> None:
        if np.any(np.asarray(j1) < 0) or np.any(np.asarray(j2) < 0):
            raise DomainError("Isochrone actions must satisfy L >= 0 and J_r >= 0")

    def default_domain(self, bins_per_dim: int = 4096) -> ActionDomain:
        return ActionDomain.isochrone(bins_per_dim)

    def _core(self, j1, j2):
        j1 = np.asarray(j1, dtype=float)
        j2 = np.asarray(j2, dtype=float)
        s = np.sqrt(j1 ** 2 + 4.0 * self.gmb)
        d = j2 + 0.5 * (j1 + s)
        omega_r = self.gm ** 2 / d ** 3
        ratio = 0.5 * (1.0 + j1 / s)
        return j1, s, d, omega_r, ratio

    def hamiltonian(self, j1, j2) -> np.ndarray:
        _, _, d, _, _ = self._core(j1, j2)
        return -self.gm ** 2 / (2.0 * d ** 2)

    def e_tilde(self, j1, j2) -> np.ndarray:
        """Dimensionless binding energy -E b / GM, in (0, 1/2] on the domain."""
        _, _, d, _, _ = self._core(j1, j2)
        return self.gmb / (2.0 * d ** 2)

    def omega(self, j1, j2):
        j1, _, _, omega_r, ratio = self._core(j1, j2)
        omega_r, ratio = np.broadcast_arrays(omega_r, ratio)
        return ratio * omega_r, omega_r.copy()

    def jacobian(self, j1, j2):
        j1, s, d, omega_r, ratio = self._core(j1, j2)
        dratio = 2.0 * self.gmb / s ** 3
        dr_dl = -3.0 * omega_r * ratio / d
        dr_dj = -3.0 * omega_r / d
        jac = np.zeros((2, 2) + _shape(j1, j2))
        jac[0, 0] = dratio * omega_r + ratio * dr_dl
        jac[0, 1] = ratio * dr_dj
        jac[1, 0] = dr_dl
        jac[1, 1] = dr_dj
        return jac

    def hessian(self, j1, j2):
        j1, s, d, omega_r, ratio = self._core(j1, j2)
        dratio = 2.0 * self.gmb / s ** 3
        d2ratio = -6.0 * self.gmb * j1 / s ** 5
        dr_dl = -3.0 * omega_r * ratio / d
        dr_dj = -3.0 * omega_r / d
        dr_ll = 12.0 * omega_r * ratio ** 2 / d ** 2 - 3.0 * omega_r * dratio / d
        dr_lj = 12.0 * omega_r * ratio / d ** 2
        dr_jj = 12.0 * omega_r / d ** 2
        hess = np.zeros((2, 2, 2) + _shape(j1, j2))
        hess[1, 0, 0] = dr_ll
        hess[1, 0, 1] = dr_lj
        hess[1, 1, 0] = dr_lj
        hess[1, 1, 1] = dr_jj
        hess[0, 0, 0] = d2ratio * omega_r + 2.0 * dratio * dr_dl + ratio * dr_ll
        hess[0, 0, 1] = dratio * dr_dj + ratio * dr_lj
        hess[0, 1, 0] = hess[0, 0, 1]
        hess[0, 1, 1] = ratio * dr_jj
        return hess

    def to_dict(self) -> dict:
        return {"name": self.name, "G": self.G, "M": self.M, "b": self.b}


def eval_frequency(model: FrequencyModel, j: Tuple[float, float]) -> Tuple[float, float]:
    """
    Evaluate Omega at a single action pair.

    Args:
        model: Frequency model
        j: Action pair (J1, J2); isochrone pairs are (L, J_r)

    Returns:
        (Omega1, Omega2)
    """
    j1, j2 = float(j[0]), float(j[1])
    model.check_domain(j1, j2)
    o1, o2 = model.omega(j1, j2)
    return float(o1), float(o2)


def _bracket_series(order: int = 14) -> np.ndarray:
    # arcsin(sqrt(x)) / sqrt(x (1 - x)) = sum_k 4^k (k!)^2 / (2k+1)! x^k
    s = [Fraction(4 ** k * math.factorial(k) ** 2, math.factorial(2 * k + 1)) for k in range(order + 1)]
    coeffs = [Fraction(0)] * (order + 1)
    for power, factor in ((0, -9), (1, 28), (2, 16)):
        for k in range(order + 1 - power):
            coeffs[k + power] += 3 * factor * s[k]
    for power, value in enumerate((27, -66, 320, -240, 64)):
        coeffs[power] += value
    return np.array([float(c) for c in coeffs])


_BRACKET_SERIES = _bracket_series()
_SERIES_BELOW = 1e-3


def _f0_bracket(e: np.ndarray) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    small = e < _SERIES_BELOW
    out = np.empty_like(e)
    if np.any(small):
        out[small] = np.polynomial.polynomial.polyval(e[small], _BRACKET_SERIES)
    big = ~small
    if np.any(big):
        eb = e[big]
        out[big] = (27.0 - 66.0 * eb + 320.0 * eb ** 2 - 240.0 * eb ** 3 + 64.0 * eb ** 4
                    + 3.0 * (16.0 * eb ** 2 + 28.0 * eb - 9.0)
                    * np.arcsin(np.sqrt(eb)) / np.sqrt(eb * (1.0 - eb)))
    return out


def isochrone_f0_from_e(e_tilde: ArrayLike, G: float = 1.0, M: float = 1.0, b: float = 1.0) -> np.ndarray:
    """Vectorized stationary distribution; no domain checks."""
    e = np.asarray(e_tilde, dtype=float)
    prefactor = 1.0 / (math.sqrt(2.0) * (2.0 * math.pi) ** 3 * (G * M * b) ** 1.5)
    return prefactor * np.sqrt(e) / (2.0 * (1.0 - e)) ** 4 * _f0_bracket(e)


def eval_isochrone_f0(e_tilde: float, G: float = 1.0, M: float = 1.0, b: float = 1.0) -> float:
    """
    Self-consistent isochrone distribution function f0(E~).

    Args:
        e_tilde: Dimensionless binding energy -E b / GM, strictly inside (0, 1)
        G, M, b: Positive model parameters

    Returns:
        f0 value (non-negative)
    """
    if not 0.0 < e_tilde < 1.0:
        raise DomainError(f"E~ must lie in (0, 1), got {e_tilde}")
    for label, value in (("G", G), ("M", M), ("b", b)):
        if not value > 0:
            raise DomainError(f"Isochrone parameter {label} must be positive, got {value}")
    value = float(isochrone_f0_from_e(np.array([e_tilde]), G, M, b)[0])
    return max(value, 0.0)


@dataclass(frozen=True)
class NuOrders:
    """
    Local structure of the numerator nu around a singular point.

    a1, a2 are the leading vanishing orders along J1 and J2; steps gives the
    smallest order increment produced by expanding the smooth envelope in
    each direction (2 when the envelope has pure parity about the point).
    decay is the power-law decay exponent at infinity, when relevant.
    """
    a1: int
    a2: int
    steps: Tuple[int, int] = (1, 1)
    decay: Optional[int] = None

    def to_dict(self) -> dict:
        return {"a1": self.a1, "a2": self.a2, "steps": list(self.steps), "decay": self.decay}


class PerturbationSpec(ABC):
    """Initial perturbation given by its Fourier coefficients ig(m, J)."""

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @abstractmethod
    def supports(self, mode: Mode) -> bool:
        """True when ig(mode, J) is not identically zero."""
        pass

    @abstractmethod
    def ig(self, mode: Mode, j1: ArrayLike, j2: ArrayLike) -> np.ndarray:
        """Real Fourier coefficient i*g(mode, J)."""
        pass

    @abstractmethod
    def weight(self, mode: Mode, j1: ArrayLike, j2: ArrayLike) -> np.ndarray:
        """Angle-integrated quadrature weight for observables of this mode."""
        pass

    @abstractmethod
    def local_orders(self, point: Tuple[float, float]) -> NuOrders:
        """Vanishing orders of the weight at a point."""
        pass

    def to_dict(self) -> dict:
        return {"name": self.name}


@dataclass(frozen=True)
class ToyFactorized(PerturbationSpec):
    """
    ig(m, J) = 1/4 J1^h1 J2^h2 (J1 - J1*)^a1 (J2 - J2*)^a2 exp(-(J1^2 + J2^2)/2)
    for m = (+-1, +-1), zero otherwise.
    """
    h1: int = 0
    h2: int = 0
    a1: int = 0
    a2: int = 0
    j1_star: float = 0.0
    j2_star: float = 0.0

    def __post_init__(self):
        for label in ("h1", "h2", "a1", "a2"):
            value = getattr(self, label)
            if int(value) != value or value < 0:
                raise DomainError(f"{label} must be a non-negative integer, got {value}")

    @property
    def name(self) -> str:
        return "toy-factorized"

    def supports(self, mode: Mode) -> bool:
        return abs(mode.m1) == 1 and abs(mode.m2) == 1

    def envelope(self, j1: ArrayLike, j2: ArrayLike) -> np.ndarray:
        j1 = np.asarray(j1, dtype=float)
        j2 = np.asarray(j2, dtype=float)
        return (0.25 * j1 ** self.h1 * j2 ** self.h2
                * (j1 - self.j1_star) ** self.a1 * (j2 - self.j2_star) ** self.a2
                * np.exp(-0.5 * (j1 ** 2 + j2 ** 2)))

    def ig(self, mode, j1, j2):
        if not self.supports(mode):
            return np.zeros(_shape(j1, j2))
        return self.envelope(j1, j2)

    def weight(self, mode, j1, j2):
        # 2 pi^2 (ig(n) + ig(-n)) after the angular integrals
        return 2.0 * math.pi ** 2 * (self.ig(mode, j1, j2) + self.ig(mode.negated(), j1, j2))

    def local_orders(self, point):
        orders = []
        steps = []
        for h, a, star, p in ((self.h1, self.a1, self.j1_star, point[0]),
                              (self.h2, self.a2, self.j2_star, point[1])):
            at_zero = abs(p) < _POINT_TOL
            at_star = abs(p - star) < _POINT_TOL
            orders.append((h if at_zero else 0) + (a if at_star else 0))
            pure = at_zero and (a == 0 or abs(star) < _POINT_TOL)
            steps.append(2 if pure else 1)
        return NuOrders(orders[0], orders[1], (steps[0], steps[1]))

    def to_dict(self) -> dict:
        return {"name": self.name, "h1": self.h1, "h2": self.h2, "a1": self.a1, "a2": self.a2,
                "j1_star": self.j1_star, "j2_star": self.j2_star}


@dataclass(frozen=True)
class IsochroneCosCos(PerturbationSpec):
    """
    f1 = a f0(J) cos(n2 theta_angular) cos(n3 theta_radial).

    ig(m, J) = a f0(J) / 4 for m = (+-n2, +-n3). The quadrature weight drops the
    overall prefactor and keeps L f0(J), the L factor coming from the
    integral over the azimuthal action.
    """
    amplitude: float = 1.0
    n2: int = 1
    n3: int = 1
    model: IsochroneModel = IsochroneModel()

    def __post_init__(self):
        if self.n2 == 0 and self.n3 == 0:
            raise DomainError("Isochrone perturbation mode (0,0) carries no dynamics")

    @property
    def name(self) -> str:
        return "isochrone-cos-cos"

    def supports(self, mode: Mode) -> bool:
        return abs(mode.m1) == abs(self.n2) and abs(mode.m2) == abs(self.n3)

    def f0(self, j1: ArrayLike, j2: ArrayLike) -> np.ndarray:
        e = self.model.e_tilde(j1, j2)
        return isochrone_f0_from_e(e, self.model.G, self.model.M, self.model.b)

    def ig(self, mode, j1, j2):
        if not self.supports(mode):
            return np.zeros(_shape(j1, j2))
        return 0.25 * self.amplitude * self.f0(j1, j2)

    def weight(self, mode, j1, j2):
        if not self.supports(mode):
            return np.zeros(_shape(j1, j2))
        return np.asarray(j1, dtype=float) * self.f0(j1, j2)

    def local_orders(self, point):
        return NuOrders(1 if abs(point[0]) < _POINT_TOL else 0, 0, (1, 1))

    def to_dict(self) -> dict:
        return {"name": self.name, "amplitude": self.amplitude, "n2": self.n2, "n3": self.n3,
                "model": self.model.to_dict()}


def eval_perturbation_g(spec: PerturbationSpec,
                        mode: Union[Mode, Tuple[int, int]],
                        j: Tuple[float, float]) -> float:
    """
    Evaluate ig(mode, J) for a perturbation family.

    Args:
        spec: Perturbation family
        mode: Mode or (m1, m2) tuple; the zero mode always yields 0
        j: Action pair

    Returns:
        Real coefficient value
    """
    if not isinstance(mode, Mode):
        if tuple(mode) == (0, 0):
            return 0.0
        mode = Mode(*mode)
    return float(spec.ig(mode, float(j[0]), float(j[1])))
