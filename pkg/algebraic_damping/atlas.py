"""
Singularity classification of mu(J) = m . Omega(J) and the damping laws they imply.

A singular point of the resolvent integral phi(z) = int nu(J) / (mu(J) - z) dJ
is one of: a vertex (domain corner with a fully nonzero gradient), a tangent
(boundary point where the tangential derivative vanishes), a critical point
(interior stationary point), a line (boundary edge on which mu is constant) or
the point at infinity (mu decaying to zero at large actions). A corner that
ends a line is still listed as a vertex, flagged line_adjacent, but adds no
law of its own.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import optimize, stats

from .errors import (
    DivergentIntegral,
    DomainError,
    NoInfinitySingularity,
    NonGenericCriticalPoint,
    NoTangentPoint,
    UnsupportedSingularity,
)
from .fields import (
    ActionDomain,
    Edge,
    FrequencyModel,
    IsochroneCosCos,
    IsochroneModel,
    Mode,
    NuOrders,
    Observable,
    Parity,
    PerturbationSpec,
    ToyFactorized,
)

logger = logging.getLogger(__name__)

LINE_SAMPLES = 64
LINE_TOL = 1e-12
GRAD_TOL = 1e-10
ZERO_FREQUENCY_TOL = 1e-12
MAX_PROMOTIONS = 8
INFINITY_RAY = (1e2, 1e4)


class SingularityKind(Enum):
    VERTEX = "vertex"
    TANGENT = "tangent"
    CRITICAL_EXTREMUM = "critical_extremum"
    CRITICAL_SADDLE = "critical_saddle"
    LINE = "line"
    INFINITY = "infinity"

    @property
    def is_critical(self) -> bool:
        return self in (SingularityKind.CRITICAL_EXTREMUM, SingularityKind.CRITICAL_SADDLE)


_KIND_ORDER = {kind: index for index, kind in enumerate(SingularityKind)}


@dataclass(frozen=True)
class SingularityPoint:
    """
    A classified singular point of mu for one mode.

    location is absent for Infinity; for a Line it is the midpoint of the
    edge named by `edge`. For a Tangent `edge` is the boundary it touches.
    A line_adjacent Vertex is a corner lying on a Line edge; its endpoint
    contribution is already part of the Line law.
    """
    kind: SingularityKind
    x0: float
    location: Optional[Tuple[float, float]] = None
    edge: Optional[Edge] = None
    orders: Tuple[int, int] = (0, 0)
    mu_decay: Optional[int] = None
    nu_decay: Optional[int] = None
    mu_parity_pure: bool = False
    special: bool = False
    line_adjacent: bool = False
    gradient: Optional[Tuple[float, float]] = None
    hessian_det: Optional[float] = None
    fit_residual: Optional[float] = None
    notes: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "kind": self.kind.value,
            "x0": self.x0,
            "location": list(self.location) if self.location is not None else None,
            "edge": self.edge.value if self.edge is not None else None,
        }
        if self.kind is SingularityKind.INFINITY:
            record["mu_decay"] = self.mu_decay
            record["nu_decay"] = self.nu_decay
            record["fit_residual"] = self.fit_residual
        else:
            record["orders"] = list(self.orders)
        record["mu_parity_pure"] = self.mu_parity_pure
        record["special"] = self.special
        if self.line_adjacent:
            record["line_adjacent"] = True
        if self.hessian_det is not None:
            record["hessian_det"] = self.hessian_det
        if self.notes:
            record["notes"] = list(self.notes)
        return record


@dataclass(frozen=True)
class DampingLaw:
    """Predicted asymptotic behaviour t^-power, oscillating at omega0."""
    kind: SingularityKind
    power: Optional[float]
    omega0: float
    relative_sign: Optional[int]
    survives_cos: bool
    survives_sin: bool
    alpha: Optional[float] = None
    orders: NuOrders = NuOrders(0, 0)
    promoted: bool = False
    vanishes: bool = False
    singularity: Optional[SingularityPoint] = field(default=None, compare=False, repr=False)

    def survives(self, parity: Parity) -> bool:
        return self.survives_cos if parity is Parity.COS else self.survives_sin

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "power": self.power,
            "omega0": self.omega0,
            "relative_sign": self.relative_sign,
            "survives_cos": self.survives_cos,
            "survives_sin": self.survives_sin,
            "alpha": self.alpha,
            "orders": self.orders.to_dict(),
            "promoted": self.promoted,
            "vanishes": self.vanishes,
        }


@dataclass(frozen=True)
class Resolution:
    """Outcome of combining modes m and -m in a cos or sin observable."""
    parity: Parity
    leading: DampingLaw
    effective: Optional[DampingLaw]
    cancelled_leading: bool
    promotions: int = 0

    @property
    def all_orders_cancelled(self) -> bool:
        return self.cancelled_leading and self.effective is None

    @property
    def label(self) -> str:
        """Table label: the surviving exponent, suffixed (N) or (C), or C."""
        if self.effective is None:
            return "C"
        text = _format_power(self.effective.power)
        if self.leading.promoted:
            return f"{text}(N)"
        if self.cancelled_leading:
            return f"{text}(C)"
        return text

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parity": self.parity.value,
            "leading": self.leading.to_dict(),
            "effective": self.effective.to_dict() if self.effective is not None else None,
            "cancelled_leading": self.cancelled_leading,
            "all_orders_cancelled": self.all_orders_cancelled,
            "promotions": self.promotions,
            "label": self.label,
        }


@dataclass(frozen=True)
class ObservablePrediction:
    """Predicted damping of one observable, aggregated over every singularity."""
    observable: Observable
    singularities: Tuple[SingularityPoint, ...]
    resolutions: Tuple[Resolution, ...]
    dominant: Optional[Resolution]
    exchange_antisymmetric: bool = False

    @property
    def all_orders_cancelled(self) -> bool:
        return self.dominant is None

    @property
    def power(self) -> Optional[float]:
        return self.dominant.effective.power if self.dominant is not None else None

    @property
    def omega0(self) -> float:
        return self.dominant.effective.omega0 if self.dominant is not None else 0.0

    @property
    def law(self) -> Optional[DampingLaw]:
        return self.dominant.effective if self.dominant is not None else None

    @property
    def label(self) -> str:
        if self.dominant is None:
            return "C"
        return self.dominant.label

    def to_dict(self) -> Dict[str, Any]:
        return {
            "observable": self.observable.to_dict(),
            "singularities": [s.to_dict() for s in self.singularities],
            "resolutions": [r.to_dict() for r in self.resolutions],
            "dominant": self.dominant.to_dict() if self.dominant is not None else None,
            "all_orders_cancelled": self.all_orders_cancelled,
            "exchange_antisymmetric": self.exchange_antisymmetric,
            "label": self.label,
        }


class InfinityExponents(NamedTuple):
    """Integer decay exponents mu ~ s^-a, nu ~ s^-b along the diagonal ray."""
    a: int
    b: int
    mu_slope: float
    nu_slope: float
    residual: float


@dataclass(frozen=True)
class IsochroneTangent:
    """Tangent point (L*, 0) of an isochrone mode and its frequency."""
    l_star: float
    omega0: float
    residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {"l_star": self.l_star, "omega0": self.omega0, "residual": self.residual}


def _format_power(power: Optional[float]) -> str:
    if power is None:
        return "none"
    if abs(power - round(power)) < 1e-9:
        return str(int(round(power)))
    return f"{power:g}"


def default_perturbation(model: FrequencyModel, mode: Mode) -> PerturbationSpec:
    """Perturbation used when none is supplied."""
    if isinstance(model, IsochroneModel):
        return IsochroneCosCos(n2=abs(mode.m1), n3=abs(mode.m2), model=model)
    return ToyFactorized()


def _point(j1, j2) -> Tuple[float, float]:
    return float(j1), float(j2)


def _gradient_scale(model: FrequencyModel, mode: Mode, j1: float, j2: float) -> float:
    jac = model.jacobian(j1, j2)
    return max(1.0, (abs(mode.m1) + abs(mode.m2)) * float(np.abs(jac).max()))


def _hessian_is_zero(model: FrequencyModel, mode: Mode, j1, j2) -> bool:
    hess = model.mode_hessian(mode, j1, j2)
    return bool(np.all(np.abs(hess) <= LINE_TOL))


def _scan_roots(func, lo: float, hi: float, samples: int) -> List[float]:
    """Interior zeros of a vectorized function on [lo, hi]."""
    s = np.linspace(lo, hi, samples + 1)
    values = np.asarray(func(s), dtype=float)
    roots: List[float] = []
    for i in range(1, samples):
        if values[i] == 0.0:
            roots.append(float(s[i]))
    crossings = np.nonzero(values[:-1] * values[1:] < 0.0)[0]
    for i in crossings:
        root = optimize.brentq(lambda x: float(func(np.asarray(x))), s[i], s[i + 1],
                               xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=200)
        roots.append(float(root))
    roots.sort()
    unique: List[float] = []
    for root in roots:
        if not unique or abs(root - unique[-1]) > 1e-9 * max(1.0, abs(root)):
            unique.append(root)
    return unique


def _find_lines(model: FrequencyModel, mode: Mode, domain: ActionDomain) -> List[SingularityPoint]:
    lines = []
    for edge in domain.physical_edges():
        lo, hi = domain.edge_span(edge)
        s = np.linspace(lo, hi, LINE_SAMPLES)
        j1, j2 = domain.edge_point(edge, s)
        mu = model.mode_frequency(mode, j1, j2)
        spread = float(mu.max() - mu.min())
        if spread >= LINE_TOL * max(1.0, float(np.abs(mu).max())):
            continue
        normal = edge.fixed_axis
        hess = model.mode_hessian(mode, j1, j2)
        curvature = float(np.abs(hess[normal, normal]).max())
        mid = domain.edge_point(edge, 0.5 * (lo + hi))
        lines.append(SingularityPoint(
            kind=SingularityKind.LINE,
            x0=float(np.mean(mu)),
            location=_point(*mid),
            edge=edge,
            mu_parity_pure=curvature <= LINE_TOL,
        ))
        logger.debug(f"Line singularity on edge {edge.value} for mode {mode}")
    return lines


def _find_vertices(model: FrequencyModel, mode: Mode, domain: ActionDomain,
                   line_edges: List[Edge]) -> List[SingularityPoint]:
    vertices = []
    for corner, e1, e2 in domain.corners():
        grad = model.mode_gradient(mode, *corner)
        scale = _gradient_scale(model, mode, *corner)
        zero = [abs(float(grad[i])) <= GRAD_TOL * scale for i in (0, 1)]
        x0 = float(model.mode_frequency(mode, *corner))
        notes = _vertex_notes(model, mode, corner, x0)
        if e1 in line_edges or e2 in line_edges:
            logger.debug(f"Corner {corner} for mode {mode} ends a line; reported as line-adjacent vertex")
            vertices.append(SingularityPoint(
                kind=SingularityKind.VERTEX,
                x0=x0,
                location=_point(*corner),
                gradient=_point(*grad),
                line_adjacent=True,
                notes=notes + ("endpoint contribution carried by the adjacent line",),
            ))
        elif not any(zero):
            vertices.append(SingularityPoint(
                kind=SingularityKind.VERTEX,
                x0=x0,
                location=_point(*corner),
                gradient=_point(*grad),
                mu_parity_pure=_hessian_is_zero(model, mode, *corner),
                notes=notes,
            ))
        elif sum(zero) == 1:
            logger.warning(f"Special vertex at {corner} for mode {mode}: one gradient component vanishes")
            vertices.append(SingularityPoint(
                kind=SingularityKind.VERTEX,
                x0=x0,
                location=_point(*corner),
                gradient=_point(*grad),
                special=True,
                notes=notes,
            ))
        else:
            logger.warning(f"Gradient of mu vanishes at corner {corner} for mode {mode}; corner skipped")
    return vertices


def _vertex_notes(model: FrequencyModel, mode: Mode, corner, x0: float) -> Tuple[str, ...]:
    if not isinstance(model, IsochroneModel) or corner != (0.0, 0.0):
        return ()
    tabulated = (mode.m1 / 2.0 + mode.m2) * math.sqrt(model.gm) / (16.0 * model.b ** 1.5)
    if abs(tabulated - x0) <= 1e-12 * max(1.0, abs(x0)):
        return ()
    logger.warning(f"Vertex frequency for mode {mode}: direct evaluation gives {x0}, "
                   f"tabulated closed form gives {tabulated} (factor 2^4)")
    return (f"direct evaluation x0={x0!r} differs from tabulated form {tabulated!r} by a factor 2^4",)


def _find_tangents(model: FrequencyModel, mode: Mode, domain: ActionDomain,
                   line_edges: List[Edge]) -> List[SingularityPoint]:
    tangents = []
    for edge in domain.physical_edges():
        if edge in line_edges:
            continue
        lo, hi = domain.edge_span(edge)
        t_axis, n_axis = edge.tangent_axis, edge.fixed_axis

        def tangential(s, edge=edge, t_axis=t_axis):
            j1, j2 = domain.edge_point(edge, s)
            return model.mode_gradient(mode, j1, j2)[t_axis]

        margin = 1e-9 * (hi - lo)
        for root in _scan_roots(tangential, lo, hi, domain.bins_per_dim):
            if root <= lo + margin or root >= hi - margin:
                continue
            j1, j2 = domain.edge_point(edge, root)
            point = _point(j1, j2)
            grad = model.mode_gradient(mode, *point)
            scale = _gradient_scale(model, mode, *point)
            if abs(float(grad[n_axis])) <= GRAD_TOL * scale:
                logger.warning(f"Stationary point of mu on edge {edge.value} at {point}; skipped")
                continue
            tangents.append(SingularityPoint(
                kind=SingularityKind.TANGENT,
                x0=float(model.mode_frequency(mode, *point)),
                location=point,
                edge=edge,
                gradient=_point(*grad),
            ))
            logger.debug(f"Tangent singularity at {point} on edge {edge.value}")
    return tangents


def _find_critical(model: FrequencyModel, mode: Mode, domain: ActionDomain) -> List[SingularityPoint]:
    n = max(domain.bins_per_dim // 8, 16)
    x1 = np.linspace(domain.j1_min, domain.j1_max, n + 2)[1:-1]
    x2 = np.linspace(domain.j2_min, domain.j2_max, n + 2)[1:-1]
    grid1, grid2 = np.meshgrid(x1, x2, indexing="ij")
    grad = model.mode_gradient(mode, grid1, grid2)

    candidate = np.ones((n - 1, n - 1), dtype=bool)
    for comp in grad:
        corners = (comp[:-1, :-1], comp[1:, :-1], comp[:-1, 1:], comp[1:, 1:])
        candidate &= (np.minimum.reduce(corners) <= 0.0) & (np.maximum.reduce(corners) >= 0.0)
    cells = np.argwhere(candidate)
    if len(cells) > 64:
        raise NonGenericCriticalPoint(f"Gradient of mu vanishes on a continuum for mode {mode}")

    def fun(p):
        return np.asarray(model.mode_gradient(mode, p[0], p[1]), dtype=float)

    def jac(p):
        return np.asarray(model.mode_hessian(mode, p[0], p[1]), dtype=float)

    found: List[Tuple[float, float]] = []
    points = []
    for i, j in cells:
        seed = np.array([0.5 * (x1[i] + x1[i + 1]), 0.5 * (x2[j] + x2[j + 1])])
        sol = optimize.root(fun, seed, jac=jac, method="hybr", options={"xtol": 1e-15})
        p = _point(*sol.x)
        inside = (domain.j1_min < p[0] < domain.j1_max) and (domain.j2_min < p[1] < domain.j2_max)
        scale = _gradient_scale(model, mode, *p) if inside else 1.0
        if not inside or float(np.abs(fun(sol.x)).max()) >= GRAD_TOL * scale:
            continue
        if any(abs(p[0] - q[0]) < 1e-8 and abs(p[1] - q[1]) < 1e-8 for q in found):
            continue
        found.append(p)
        hess = jac(sol.x)
        det = float(np.linalg.det(hess))
        if abs(det) <= 1e-12 * max(1.0, float(np.abs(hess).max()) ** 2):
            raise NonGenericCriticalPoint(f"Degenerate Hessian of mu at {p} for mode {mode}", location=p)
        kind = SingularityKind.CRITICAL_EXTREMUM if det > 0 else SingularityKind.CRITICAL_SADDLE
        points.append(SingularityPoint(
            kind=kind,
            x0=float(model.mode_frequency(mode, *p)),
            location=p,
            gradient=_point(*fun(sol.x)),
            hessian_det=det,
            mu_parity_pure=True,
        ))
        logger.debug(f"{kind.value} at {p} (det={det:.6g})")
    return points


def infinity_exponents(model: FrequencyModel, spec: PerturbationSpec, mode: Mode) -> InfinityExponents:
    """
    Fit the decay exponents of mu and of the quadrature weight along J1 = J2 = s.

    Args:
        model: Frequency model
        spec: Perturbation providing the weight nu
        mode: Mode

    Returns:
        Rounded exponents (a, b) with the raw slopes and the worst rounding residual
    """
    s = np.geomspace(INFINITY_RAY[0], INFINITY_RAY[1], 33)
    mu = np.abs(model.mode_frequency(mode, s, s))
    if not np.all(np.isfinite(mu)) or np.any(mu == 0.0):
        raise NoInfinitySingularity(f"mu does not decay along the diagonal for mode {mode}")
    mu_fit = stats.linregress(np.log(s), np.log(mu))
    if mu_fit.slope > -0.5:
        raise NoInfinitySingularity(
            f"mu does not decay at large actions for mode {mode} (slope {mu_fit.slope:.3f})")
    nu = np.abs(spec.weight(mode, s, s))
    if not np.all(np.isfinite(nu)) or np.any(nu == 0.0):
        raise NoInfinitySingularity(f"Numerator vanishes along the diagonal for mode {mode}")
    nu_fit = stats.linregress(np.log(s), np.log(nu))
    a = int(round(-mu_fit.slope))
    b = int(round(-nu_fit.slope))
    residual = max(abs(a + mu_fit.slope), abs(b + nu_fit.slope))
    if residual > 0.05:
        logger.warning(f"Decay exponents for mode {mode} are not close to integers: "
                       f"slopes {mu_fit.slope:.4f}, {nu_fit.slope:.4f}")
    return InfinityExponents(a, b, float(mu_fit.slope), float(nu_fit.slope), float(residual))


def classify(model: FrequencyModel, mode: Mode, domain: Optional[ActionDomain] = None,
             spec: Optional[PerturbationSpec] = None) -> List[SingularityPoint]:
    """
    Find and classify every singular point of mu = m . Omega on a domain.

    Args:
        model: Frequency model
        mode: Non-zero mode
        domain: Action domain; the model's default when omitted
        spec: Perturbation used to attach numerator orders and the decay at
            infinity; a default family for the model when omitted

    Returns:
        Singularities sorted by kind then location
    """
    domain = domain or model.default_domain()
    model.check_domain(domain.j1_min, domain.j2_min)
    spec = spec or default_perturbation(model, mode)

    lines = _find_lines(model, mode, domain)
    line_edges = [s.edge for s in lines]
    points = lines
    points += _find_vertices(model, mode, domain, line_edges)
    points += _find_tangents(model, mode, domain, line_edges)
    points += _find_critical(model, mode, domain)

    if domain.is_truncated and model.decays_at_infinity:
        try:
            exps = infinity_exponents(model, spec, mode)
        except NoInfinitySingularity as e:
            logger.debug(f"No singularity at infinity: {e}")
        else:
            points.append(SingularityPoint(
                kind=SingularityKind.INFINITY,
                x0=0.0,
                mu_decay=exps.a,
                nu_decay=exps.b,
                fit_residual=exps.residual,
            ))

    points = [
        replace(p, orders=_orders_tuple(spec.local_orders(p.location)))
        if p.location is not None else p
        for p in points
    ]
    points.sort(key=lambda p: (_KIND_ORDER[p.kind], p.location or (math.inf, math.inf)))
    logger.info(f"Classified {len(points)} singularities for {model.name} mode {mode}: "
                f"{', '.join(p.kind.value for p in points) or 'none'}")
    return points


def _orders_tuple(orders: NuOrders) -> Tuple[int, int]:
    return orders.a1, orders.a2


def _sign(alpha: float, odd_offset: int) -> Optional[int]:
    if abs(alpha - round(alpha)) > 1e-9:
        return None
    return 1 if (int(round(alpha)) + odd_offset) % 2 == 0 else -1


def predict_damping(sing: SingularityPoint, nu_orders: NuOrders) -> DampingLaw:
    """
    Damping law of one singularity for a numerator with the given local orders.

    Args:
        sing: Classified singularity
        nu_orders: Leading vanishing orders of nu at the singularity

    Returns:
        DampingLaw; `vanishes` is set when no order of the expansion contributes
    """
    if sing.special:
        raise UnsupportedSingularity(f"Special vertex at {sing.location} has no tabulated damping law")

    omega0 = abs(sing.x0)
    kind = sing.kind
    orders = nu_orders
    promoted = False
    sign: Optional[int] = None

    if kind is SingularityKind.VERTEX:
        alpha = 1.0 + orders.a1 + orders.a2
        sign = _sign(alpha, 1)
    elif kind is SingularityKind.TANGENT:
        t_axis, n_axis = sing.edge.tangent_axis, sing.edge.fixed_axis
        values = [orders.a1, orders.a2]
        if values[t_axis] % 2 == 1:
            if orders.steps[t_axis] % 2 == 0:
                return _vanishing_law(sing, orders)
            values[t_axis] += orders.steps[t_axis]
            promoted = True
        orders = replace(orders, a1=values[0], a2=values[1])
        alpha = 0.5 + values[t_axis] / 2.0 + values[n_axis]
    elif kind.is_critical:
        values = [orders.a1, orders.a2]
        for axis in (0, 1):
            if values[axis] % 2 == 1:
                if orders.steps[axis] % 2 == 0:
                    return _vanishing_law(sing, orders)
                values[axis] += orders.steps[axis]
                promoted = True
        orders = replace(orders, a1=values[0], a2=values[1])
        alpha = (values[0] + values[1]) / 2.0
        sign = _sign(alpha, 1 if kind is SingularityKind.CRITICAL_EXTREMUM else 0)
    elif kind is SingularityKind.LINE:
        alpha = float((orders.a1, orders.a2)[sing.edge.fixed_axis])
        sign = _sign(alpha, 1)
    elif kind is SingularityKind.INFINITY:
        b = orders.decay if orders.decay is not None else sing.nu_decay
        a = sing.mu_decay
        if a is None or b is None or a <= 0:
            raise DomainError("Infinity singularity requires positive decay exponents")
        if b <= 2:
            raise DivergentIntegral(f"Numerator decay b={b} must exceed 2 for a convergent integral")
        orders = replace(orders, decay=b)
        power = (b - 2.0) / a
        alpha = power - 1.0
        sign = _sign(alpha, 1)
        return _law(sing, power, omega0, sign, alpha, orders, promoted)
    else:
        raise UnsupportedSingularity(f"No damping law for {kind}")

    return _law(sing, 1.0 + alpha, omega0, sign, alpha, orders, promoted)


def _law(sing, power, omega0, sign, alpha, orders, promoted) -> DampingLaw:
    if omega0 > ZERO_FREQUENCY_TOL or sign is None:
        survives_cos = survives_sin = True
    else:
        survives_cos = sign == 1
        survives_sin = sign == -1
    return DampingLaw(
        kind=sing.kind,
        power=power,
        omega0=omega0,
        relative_sign=sign,
        survives_cos=survives_cos,
        survives_sin=survives_sin,
        alpha=alpha,
        orders=orders,
        promoted=promoted,
        singularity=sing,
    )


def _vanishing_law(sing: SingularityPoint, orders: NuOrders) -> DampingLaw:
    logger.debug(f"{sing.kind.value} at {sing.location}: odd order never promoted to even")
    return DampingLaw(kind=sing.kind, power=None, omega0=abs(sing.x0), relative_sign=None,
                      survives_cos=False, survives_sin=False, orders=orders, vanishes=True,
                      singularity=sing)


def _next_orders(law: DampingLaw) -> Optional[NuOrders]:
    """Orders of the next expansion term whose relative sign differs."""
    sing = law.singularity
    orders = law.orders
    if sing is None:
        return None
    kind = law.kind
    if kind is SingularityKind.VERTEX:
        if orders.steps[0] % 2 == 1:
            return replace(orders, a1=orders.a1 + 1)
        if orders.steps[1] % 2 == 1:
            return replace(orders, a2=orders.a2 + 1)
        if not sing.mu_parity_pure:
            # curvature of mu shifts the singular exponent by one
            return replace(orders, a1=orders.a1 + 1)
        return None
    if kind is SingularityKind.LINE:
        normal = sing.edge.fixed_axis
        if orders.steps[normal] % 2 == 1 or not sing.mu_parity_pure:
            values = [orders.a1, orders.a2]
            values[normal] += 1
            return replace(orders, a1=values[0], a2=values[1])
        return None
    if kind.is_critical:
        return replace(orders, a1=orders.a1 + 2)
    if kind is SingularityKind.INFINITY:
        return replace(orders, decay=orders.decay + 1)
    return None


def resolve_cancellation(law_plus: DampingLaw, observable: Observable) -> Resolution:
    """
    Combine modes m and -m for a cos (sum) or sin (difference) observable.

    Args:
        law_plus: Law of the mode m
        observable: Observable whose parity selects the combination

    Returns:
        Resolution with the first surviving law, or none when all orders cancel
    """
    parity = observable.parity
    if law_plus.survives(parity):
        return Resolution(parity, law_plus, law_plus, cancelled_leading=False)

    current = law_plus
    for promotions in range(1, MAX_PROMOTIONS + 1):
        orders = _next_orders(current)
        if orders is None:
            logger.debug(f"{law_plus.kind.value}: all orders cancel for {observable.name}")
            return Resolution(parity, law_plus, None, cancelled_leading=True, promotions=promotions - 1)
        current = predict_damping(current.singularity, orders)
        if current.survives(parity):
            current = replace(current, promoted=False)
            return Resolution(parity, law_plus, current, cancelled_leading=True, promotions=promotions)
    logger.warning(f"{law_plus.kind.value}: no surviving order within {MAX_PROMOTIONS} promotions")
    return Resolution(parity, law_plus, None, cancelled_leading=True, promotions=MAX_PROMOTIONS)


def exchange_antisymmetric(model: FrequencyModel, spec: PerturbationSpec, mode: Mode,
                           domain: ActionDomain, samples: int = 17) -> bool:
    """True when nu is symmetric and mu antisymmetric under J1 <-> J2."""
    if (domain.j1_min, domain.j1_max) != (domain.j2_min, domain.j2_max):
        return False
    s = np.linspace(domain.j1_min, domain.j1_max, samples)
    j1, j2 = np.meshgrid(s, s, indexing="ij")
    w = spec.weight(mode, j1, j2)
    w_swapped = spec.weight(mode, j2, j1)
    w_scale = float(np.abs(w).max())
    if w_scale == 0.0:
        return False
    mu = model.mode_frequency(mode, j1, j2)
    mu_swapped = model.mode_frequency(mode, j2, j1)
    mu_scale = max(1.0, float(np.abs(mu).max()))
    return bool(np.all(np.abs(w - w_swapped) <= 1e-12 * w_scale)
                and np.all(np.abs(mu + mu_swapped) <= 1e-12 * mu_scale))


def predict_observable(model: FrequencyModel, spec: PerturbationSpec, observable: Observable,
                       domain: Optional[ActionDomain] = None) -> ObservablePrediction:
    """
    Predict the asymptotic damping of <A>(t) for one observable.

    Every singularity of the observable's mode is classified, given its law and
    resolved against the observable's parity; the slowest surviving law wins.
    """
    domain = domain or model.default_domain()
    mode = observable.n
    singularities = classify(model, mode, domain, spec)
    antisymmetric = (observable.parity is Parity.SIN
                     and exchange_antisymmetric(model, spec, mode, domain))

    resolutions = []
    for sing in singularities:
        if sing.special:
            logger.warning(f"Skipping special vertex at {sing.location}: no damping law")
            continue
        if sing.line_adjacent:
            logger.debug(f"Vertex at {sing.location} ends a line; its law is the line's")
            continue
        if sing.kind is SingularityKind.INFINITY:
            orders = NuOrders(0, 0, decay=sing.nu_decay)
        else:
            orders = spec.local_orders(sing.location)
        law = predict_damping(sing, orders)
        if law.vanishes:
            continue
        resolutions.append(resolve_cancellation(law, observable))

    dominant = None
    if not antisymmetric:
        surviving = [r for r in resolutions if r.effective is not None]
        if surviving:
            dominant = min(surviving, key=lambda r: (r.effective.power, _KIND_ORDER[r.effective.kind]))
    else:
        logger.info(f"{observable.name}: nu symmetric and mu antisymmetric under exchange, "
                    f"every order cancels")

    prediction = ObservablePrediction(observable, tuple(singularities), tuple(resolutions),
                                      dominant, antisymmetric)
    logger.info(f"Prediction for {model.name} {observable.name}: {prediction.label}")
    return prediction


def tangent_equation(l: np.ndarray, G: float = 1.0, M: float = 1.0, b: float = 1.0) -> np.ndarray:
    """
    Left side of the isochrone tangent condition on the J_r = 0 edge.

    d(mu)/dL = 0 at J_r = 0 reduces to -r(L) + (2/3) GMb / (L^2 + 4GMb) = m2/m1,
    a strictly decreasing function from -1/3 at L = 0 to -1 as L grows.
    """
    gmb = G * M * b
    l = np.asarray(l, dtype=float)
    s2 = l ** 2 + 4.0 * gmb
    return -0.5 * (1.0 + l / np.sqrt(s2)) + (2.0 / 3.0) * gmb / s2


def tangent_point_isochrone(mode: Mode, G: float = 1.0, M: float = 1.0, b: float = 1.0) -> IsochroneTangent:
    """
    Solve for the isochrone tangent point (L*, 0) of a mode.

    Args:
        mode: Mode (m1, m2) multiplying (Omega_angular, Omega_radial)
        G, M, b: Isochrone parameters

    Returns:
        IsochroneTangent with L*, omega0 = |mu(L*, 0)| and the residual
    """
    if mode.m1 == 0:
        raise NoTangentPoint(f"Mode {mode} has no angular component; no tangent point")
    ratio = mode.m2 / mode.m1
    if abs(ratio + 1.0 / 3.0) < 1e-15:
        raise NoTangentPoint(f"Mode {mode} gives a special vertex at the origin", special_vertex=True)
    if not -1.0 < ratio < -1.0 / 3.0:
        raise NoTangentPoint(f"Mode {mode}: ratio m2/m1 = {ratio:.6g} outside (-1, -1/3)")

    def residual(l):
        return float(tangent_equation(l, G, M, b)) - ratio

    hi = 1.0
    while residual(hi) > 0.0:
        hi *= 2.0
    l_star = optimize.brentq(residual, 0.0, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=500)
    model = IsochroneModel(G, M, b)
    omega0 = abs(float(model.mode_frequency(mode, l_star, 0.0)))
    res = abs(residual(l_star))
    logger.info(f"Isochrone tangent point for mode {mode}: L*={l_star:.12g}, omega0={omega0:.6g}")
    return IsochroneTangent(float(l_star), omega0, res)


def estimate_nu_order(spec: PerturbationSpec, mode: Mode, point: Tuple[float, float],
                      axis: int, offset: float = 1e-3) -> float:
    """
    Log-log estimate of the vanishing order of the weight along one axis.

    The other coordinate is moved inward by `offset` so that a zero of its own
    factor does not mask the slope. Used only to cross-check local_orders.
    """
    deltas = np.geomspace(1e-5, 1e-3, 9)
    j = [np.full_like(deltas, point[0]), np.full_like(deltas, point[1])]
    j[axis] = j[axis] + deltas
    j[1 - axis] = j[1 - axis] + offset
    w = np.abs(spec.weight(mode, j[0], j[1]))
    if np.any(w == 0.0):
        raise DomainError(f"Weight vanishes identically near {point}")
    return float(stats.linregress(np.log(deltas), np.log(w)).slope)
