"""
Resolvent integrals phi(z) = int nu / (mu - z), their boundary values on the
real axis and the closed-form singular parts of the three model kernels.

The model kernels are one-dimensional integrals of h(u) / (u - z):

    PowerFull  h = u^alpha         on [-c, c], alpha a non-negative integer
    PowerHalf  h = u^alpha         on [0, c],  alpha not a negative integer
    PowerLog   h = u^alpha ln|u|   on [-c, c], alpha a non-negative integer

Every singularity of a two-dimensional resolvent reduces to one of them near
x = 0. Each closed form here is paired with a brute-force quadrature so the
two can be compared.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from .errors import DomainError, UnsupportedSingularity
from .fields import ActionDomain

logger = logging.getLogger(__name__)

DEFAULT_YS = (1e-2, 1e-3, 1e-4, 1e-5)
_QUAD = {"limit": 1000, "epsabs": 1e-13, "epsrel": 1e-11}


class KernelForm(Enum):
    POWER_FULL = "power_full"
    POWER_HALF = "power_half"
    POWER_LOG = "power_log"


class SingularForm(Enum):
    """Shape of the singular part of a boundary value at x = 0."""
    REGULAR = "regular"
    FORM_1A = "1a"
    FORM_1B = "1b"
    FORM_2 = "2"


def _is_integer(value: float) -> bool:
    return abs(value - round(value)) < 1e-12


@dataclass(frozen=True)
class KernelKind:
    """Model kernel h(u) on its support."""
    form: KernelForm
    alpha: float
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"Kernel half-width c must be positive, got {self.c}")
        if self.form in (KernelForm.POWER_FULL, KernelForm.POWER_LOG):
            if not _is_integer(self.alpha) or self.alpha < 0:
                raise DomainError(f"{self.form.value} requires a non-negative integer alpha, got {self.alpha}")
        elif _is_integer(self.alpha) and self.alpha < 0:
            raise DomainError(f"power_half excludes negative integer alpha, got {self.alpha}")

    @classmethod
    def full(cls, alpha: int, c: float = 1.0) -> "KernelKind":
        return cls(KernelForm.POWER_FULL, alpha, c)

    @classmethod
    def half(cls, alpha: float, c: float = 1.0) -> "KernelKind":
        return cls(KernelForm.POWER_HALF, alpha, c)

    @classmethod
    def log(cls, alpha: int, c: float = 1.0) -> "KernelKind":
        return cls(KernelForm.POWER_LOG, alpha, c)

    @property
    def support(self) -> Tuple[float, float]:
        if self.form is KernelForm.POWER_HALF:
            return 0.0, self.c
        return -self.c, self.c

    @property
    def singular_form(self) -> SingularForm:
        if self.form is KernelForm.POWER_FULL:
            return SingularForm.REGULAR
        if self.form is KernelForm.POWER_LOG:
            return SingularForm.FORM_2
        return SingularForm.FORM_1A if _is_integer(self.alpha) else SingularForm.FORM_1B

    @property
    def label(self) -> str:
        return f"{self.form.value}(alpha={self.alpha:g}, c={self.c:g})"

    def h(self, u) -> np.ndarray:
        """Kernel numerator, zero outside the support."""
        u = np.asarray(u, dtype=float)
        lo, hi = self.support
        inside = (u > lo) & (u < hi) if self.form is KernelForm.POWER_HALF else (u >= lo) & (u <= hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.form is KernelForm.POWER_HALF:
                value = np.where(u > 0, np.abs(u) ** self.alpha, 0.0)
            else:
                value = u ** int(round(self.alpha))
                if self.form is KernelForm.POWER_LOG:
                    value = np.where(u != 0, value * np.log(np.abs(u)), 0.0)
        return np.where(inside, value, 0.0)


@dataclass(frozen=True)
class BoundaryValue:
    """Limit estimate of phi(x + iy) as y -> 0+."""
    x: float
    value: complex
    ys: Tuple[float, ...]
    history: Tuple[complex, ...]
    stable: bool
    spread: float

    def to_dict(self) -> Dict:
        return {
            "x": self.x,
            "value": [self.value.real, self.value.imag],
            "ys": list(self.ys),
            "history": [[v.real, v.imag] for v in self.history],
            "stable": self.stable,
            "spread": self.spread,
        }


def _quad(func, lo, hi, **kwargs) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        options = dict(_QUAD)
        options.update(kwargs)
        return integrate.quad(func, lo, hi, **options)[0]


def phi_upper_1d(nu: Callable, mu: Callable, z: complex, lo: float, hi: float) -> complex:
    """
    One-dimensional resolvent int_lo^hi nu(u) / (mu(u) - z) du for Im z > 0.

    Args:
        nu: Numerator, scalar callable
        mu: Denominator offset, scalar callable
        z: Complex frequency in the upper half-plane
        lo, hi: Integration limits

    Returns:
        Complex integral value
    """
    if not z.imag > 0:
        raise DomainError(f"phi_upper requires Im z > 0, got {z}; use phi_boundary_numeric")

    def real_part(u):
        d = mu(u) - z
        return (nu(u) / d).real

    def imag_part(u):
        d = mu(u) - z
        return (nu(u) / d).imag

    return complex(_quad(real_part, lo, hi), _quad(imag_part, lo, hi))


def _midpoint_sum(nu: Callable, mu: Callable, z: complex, domain: ActionDomain, bins: int) -> complex:
    grid = domain.with_bins(bins)
    j1_nodes, j2_nodes = grid.nodes()
    real_parts: List[float] = []
    imag_parts: List[float] = []
    for start in range(0, bins, 256):
        j1 = j1_nodes[start:start + 256, None]
        values = nu(j1, j2_nodes[None, :]) / (mu(j1, j2_nodes[None, :]) - z)
        real_parts.append(float(np.sum(values.real)))
        imag_parts.append(float(np.sum(values.imag)))
    return complex(math.fsum(real_parts), math.fsum(imag_parts)) * grid.cell_area


def phi_upper(nu: Callable, mu: Callable, z: complex, domain: ActionDomain, bins: int = 512) -> complex:
    """
    Two-dimensional resolvent over an action domain, Im z > 0.

    Midpoint sums on bins and 2*bins cells per dimension are combined by
    Richardson extrapolation; the integrand is bounded by |nu| / Im z.

    Args:
        nu: Vectorized numerator nu(J1, J2)
        mu: Vectorized denominator offset mu(J1, J2)
        z: Complex frequency with positive imaginary part
        domain: Integration domain
        bins: Coarse grid cells per dimension

    Returns:
        Complex integral value
    """
    if not z.imag > 0:
        raise DomainError(f"phi_upper requires Im z > 0, got {z}; use phi_boundary_numeric")
    coarse = _midpoint_sum(nu, mu, z, domain, bins)
    fine = _midpoint_sum(nu, mu, z, domain, 2 * bins)
    return (4.0 * fine - coarse) / 3.0


def _limit_points(x: float, y: float, lo: float, hi: float) -> List[float]:
    points = {0.0} if lo < 0.0 < hi else set()
    for factor in (0.0, 1.0, 32.0, 1024.0, 32768.0):
        for sign in (-1.0, 1.0):
            p = x + sign * factor * y
            if lo < p < hi:
                points.add(p)
    return sorted(points)


def _phi_at(kind: KernelKind, w: complex) -> complex:
    """int h(u) / (u - w) du for w off the real axis."""
    lo, hi = kind.support
    x, y = w.real, w.imag
    points = _limit_points(x, abs(y), lo, hi)

    def real_part(u):
        d = u - x
        return float(kind.h(u)) * d / (d * d + y * y)

    def imag_part(u):
        d = u - x
        return float(kind.h(u)) * y / (d * d + y * y)

    return complex(_quad(real_part, lo, hi, points=points), _quad(imag_part, lo, hi, points=points))


def phi_boundary_numeric(kind: KernelKind, x: float, ys: Sequence[float] = DEFAULT_YS,
                         mirrored: bool = False, stability_tol: float = 1e-3) -> BoundaryValue:
    """
    Brute-force boundary value lim_{y -> 0+} phi(x + iy) of a model kernel.

    The mirrored kernel is the mode -m counterpart,
    -lim_{y -> 0+} int h(u) / (u + x + iy) du.

    Args:
        kind: Model kernel
        x: Real point inside or outside the support
        ys: Decreasing sequence of positive offsets
        mirrored: Evaluate the mirrored kernel
        stability_tol: Relative spread of the last two estimates accepted as converged

    Returns:
        BoundaryValue with the Richardson estimate and its history
    """
    ys = tuple(float(y) for y in ys)
    if len(ys) < 2 or any(y <= 0 for y in ys) or any(b >= a for a, b in zip(ys, ys[1:])):
        raise DomainError("ys must be a decreasing sequence of at least two positive values")

    history = []
    for y in ys:
        if mirrored:
            history.append(-_phi_at(kind, complex(-x, -y)))
        else:
            history.append(_phi_at(kind, complex(x, y)))

    y_prev, y_last = ys[-2], ys[-1]
    value = history[-1] + (history[-1] - history[-2]) * y_last / (y_prev - y_last)
    spread = abs(history[-1] - history[-2])
    stable = spread <= stability_tol * max(1.0, abs(history[-1]))
    if not stable:
        logger.warning(f"Unstable boundary limit for {kind.label} at x={x}: spread {spread:.3g}")
    return BoundaryValue(x, complex(value), ys, tuple(history), stable, float(spread))


def _half_line_pv(alpha: float, with_log: bool, c: float, x: float) -> float:
    """PV int_0^c v^alpha (ln v)^[with_log] / (v - x) dv."""
    weight = "alg-loga" if with_log else "alg"
    if x <= 0.0 or x >= c:
        if x == 0.0:
            if alpha <= 0.0:
                raise DomainError("Principal value diverges at x = 0 for alpha <= 0")
            return _quad(lambda v: v ** (alpha - 1.0) * (math.log(v) if with_log else 1.0), 0.0, c)
        return _quad(lambda v: 1.0 / (v - x), 0.0, c, weight=weight, wvar=(alpha, 0.0))
    split = 0.5 * x
    inner = _quad(lambda v: 1.0 / (v - x), 0.0, split, weight=weight, wvar=(alpha, 0.0))

    def smooth(v):
        value = v ** alpha
        return value * math.log(v) if with_log else value

    outer = _quad(smooth, split, c, weight="cauchy", wvar=x)
    return inner + outer


def phi_boundary_pv(kind: KernelKind, x: float) -> complex:
    """
    Exact boundary value PV int h(u) / (u - x) du + i pi h(x).

    Args:
        kind: Model kernel
        x: Real point, not an endpoint of the support

    Returns:
        Complex boundary value
    """
    lo, hi = kind.support
    if x in (lo, hi):
        raise DomainError(f"x={x} sits on an endpoint of the support of {kind.label}")
    if kind.form is KernelForm.POWER_HALF and kind.alpha <= -1.0:
        raise DomainError(f"Kernel {kind.label} is not integrable at u = 0")

    alpha = kind.alpha
    if kind.form is KernelForm.POWER_HALF:
        real = _half_line_pv(alpha, False, kind.c, x)
    elif kind.form is KernelForm.POWER_FULL:
        n = int(round(alpha))
        if lo < x < hi:
            real = _quad(lambda u: u ** n, lo, hi, weight="cauchy", wvar=x)
        else:
            real = _quad(lambda u: u ** n / (u - x), lo, hi)
    else:
        n = int(round(alpha))
        if x == 0.0:
            real = 0.0 if n == 0 else 2.0 * _quad(lambda v: v ** (n - 1) * math.log(v), 0.0, kind.c) * (n % 2 == 1)
        else:
            # the negative half maps onto the positive one with u -> -u
            real = _half_line_pv(n, True, kind.c, x) + (-1.0) ** (n + 1) * _half_line_pv(n, True, kind.c, -x)
    inside = lo < x < hi
    imag = math.pi * float(kind.h(x)) if inside else 0.0
    return complex(real, imag)


def form1b_series_constants(alpha: float, terms: int = 200000) -> Tuple[float, float]:
    """
    Constants (C1, C2) of the non-integer half-line kernel from their series.

    C1 = -sum_k [1/(alpha+k+1) + 1/(alpha-k)],
    C2 = sum_k (-1)^k [1/(alpha+k+1) - 1/(alpha-k)].
    """
    if _is_integer(alpha):
        raise DomainError(f"Series constants exist only for non-integer alpha, got {alpha}")
    k = np.arange(terms, dtype=float)
    c1_terms = 1.0 / (alpha + k + 1.0) + 1.0 / (alpha - k)
    # integral estimate of the tail beyond the last term
    tail = -math.log((terms + alpha + 0.5) / (terms - 0.5 - alpha))
    c1 = -(math.fsum(c1_terms) + tail)
    c2_terms = (-1.0) ** k * (1.0 / (alpha + k + 1.0) - 1.0 / (alpha - k))
    partial = np.cumsum(c2_terms)
    c2 = 0.5 * (partial[-1] + partial[-2])
    return float(c1), float(c2)


def form2_constant() -> float:
    """Jump of PV int ln|u| / (u - x) du across x = 0 (Hilbert transform of ln|u|)."""
    return math.pi ** 2


def _heaviside(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0, 1.0, 0.0)


def phi_singular_form(kind: KernelKind, x, constants: Optional[Tuple[float, ...]] = None):
    """
    Closed-form singular part of the boundary value near x = 0.

    Args:
        kind: Model kernel
        x: Real point(s), non-zero
        constants: (C1, C2) for the non-integer half-line form, (C,) for the
            log form; series values are used when omitted

    Returns:
        Complex value (array when x is an array)
    """
    xs = np.asarray(x, dtype=float)
    form = kind.singular_form
    alpha = kind.alpha
    step = _heaviside(xs)
    with np.errstate(divide="ignore", invalid="ignore"):
        if form is SingularForm.REGULAR:
            out = np.zeros_like(xs, dtype=complex)
        elif form is SingularForm.FORM_1A:
            power = xs ** int(round(alpha))
            out = -power * np.log(np.abs(xs)) + 1j * math.pi * power * step
        elif form is SingularForm.FORM_1B:
            c1, c2 = constants if constants is not None else form1b_series_constants(alpha)
            plus = np.where(xs > 0, np.abs(xs) ** alpha, 0.0)
            minus = np.where(xs < 0, np.abs(xs) ** alpha, 0.0)
            out = c1 * plus + c2 * minus + 1j * math.pi * plus
        else:
            (c,) = constants if constants is not None else (form2_constant(),)
            power = xs ** int(round(alpha))
            out = c * power * step + 1j * math.pi * power * np.log(np.abs(xs))
    return complex(out) if out.ndim == 0 else out


def relative_sign(form: SingularForm, alpha: int) -> int:
    """
    Relative sign between the singular parts of modes -m and m at x0 = 0.

    (-1)^(1+alpha) for the logarithmic-real form 1a, (-1)^alpha for the
    logarithmic-imaginary form 2.
    """
    if form is SingularForm.FORM_1B:
        raise UnsupportedSingularity("Form 1b singular parts have no simple relative sign")
    if form is SingularForm.REGULAR:
        raise UnsupportedSingularity("Regular kernels have no singular part")
    if not _is_integer(alpha) or alpha < 0:
        raise DomainError(f"Relative sign requires a non-negative integer alpha, got {alpha}")
    exponent = int(round(alpha)) + (1 if form is SingularForm.FORM_1A else 0)
    return 1 if exponent % 2 == 0 else -1


@dataclass(frozen=True)
class SingularFit:
    """Least-squares coefficients of the singular basis functions."""
    coefficients: Dict[str, float]
    rms_residual: float

    def to_dict(self) -> Dict:
        return {"coefficients": dict(self.coefficients), "rms_residual": self.rms_residual}


def _singular_columns(form: SingularForm, alpha: float, xs: np.ndarray):
    step = _heaviside(xs)
    with np.errstate(divide="ignore", invalid="ignore"):
        if form is SingularForm.FORM_1B:
            plus = np.where(xs > 0, np.abs(xs) ** alpha, 0.0)
            minus = np.where(xs < 0, np.abs(xs) ** alpha, 0.0)
            return {"re_step_plus": plus, "re_step_minus": minus}, {"im_step": plus}
        power = xs ** int(round(alpha))
        log = power * np.log(np.abs(xs))
        if form is SingularForm.FORM_2:
            return {"re_step": power * step}, {"im_log": log}
        return {"re_log": log}, {"im_step": power * step}


def fit_singular_coefficients(xs, values, form: SingularForm, alpha: float, degree: int = 4) -> SingularFit:
    """
    Fit values against a polynomial plus the singular basis of a form.

    Real and imaginary parts are fitted separately. Regular kernels are
    fitted with the form-1a basis so a spurious logarithm or step shows up.

    Args:
        xs: Sample points on both sides of 0
        values: Complex values at xs
        form: Expected singular form
        alpha: Exponent of the singular basis
        degree: Degree of the regular polynomial

    Returns:
        SingularFit with one coefficient per singular basis function
    """
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=complex)
    basis_form = SingularForm.FORM_1A if form is SingularForm.REGULAR else form
    real_cols, imag_cols = _singular_columns(basis_form, alpha, xs)
    poly = np.vander(xs, degree + 1, increasing=True)
    coefficients: Dict[str, float] = {}
    residuals = []
    for cols, target in ((real_cols, values.real), (imag_cols, values.imag)):
        names = list(cols)
        matrix = np.column_stack([poly] + [cols[n] for n in names])
        solution, *_ = np.linalg.lstsq(matrix, target, rcond=None)
        residuals.append(target - matrix @ solution)
        for name, coef in zip(names, solution[degree + 1:]):
            coefficients[name] = float(coef)
    rms = float(np.sqrt(np.mean(np.concatenate(residuals) ** 2)))
    return SingularFit(coefficients, rms)


def default_fit_points(count: int = 12) -> np.ndarray:
    """Points on +-[1e-3, 1e-1] used by residual-smoothness checks."""
    positive = np.geomspace(1e-3, 1e-1, count)
    return np.concatenate([-positive[::-1], positive])


@dataclass(frozen=True)
class TangentReduction:
    """Two-dimensional tangent kernel integral against its one-dimensional reduction."""
    a1: int
    a2: int
    z: complex
    two_d: complex
    reduced: complex
    rel_error: float

    def to_dict(self) -> Dict:
        return {
            "a1": self.a1,
            "a2": self.a2,
            "z": [self.z.real, self.z.imag],
            "two_d": [self.two_d.real, self.two_d.imag],
            "reduced": [self.reduced.real, self.reduced.imag],
            "rel_error": self.rel_error,
        }


def tangent_reduction_check(a1: int, a2: int, z: complex, u_max: float = 1.0) -> TangentReduction:
    """
    Compare int J1^a1 J2^a2 / (J1^2 + J2 - z) over {J2 >= 0, J1^2 + J2 <= U}
    with B((a1+1)/2, a2+1) int_0^U u^(1/2 + a1/2 + a2) / (u - z) du.

    For odd a1 the region is symmetric in J1 and both sides vanish.
    """
    if not z.imag > 0:
        raise DomainError(f"Tangent reduction check needs Im z > 0, got {z}")
    x, y = z.real, z.imag
    root = math.sqrt(u_max)

    def part(kind):
        def integrand(j2, j1):
            d = j1 * j1 + j2 - x
            num = j1 ** a1 * j2 ** a2
            return num * (d if kind == "re" else y) / (d * d + y * y)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return integrate.dblquad(integrand, -root, root, 0.0, lambda j1: u_max - j1 * j1,
                                     epsabs=1e-12, epsrel=1e-10)[0]

    two_d = complex(part("re"), part("im"))
    if a1 % 2 == 1:
        reduced = 0j
    else:
        p = 0.5 + a1 / 2.0 + a2
        beta = special.beta((a1 + 1) / 2.0, a2 + 1.0)
        points = [x] if 0.0 < x < u_max else None
        re = _quad(lambda u: u ** p * (u - x) / ((u - x) ** 2 + y * y), 0.0, u_max, points=points)
        im = _quad(lambda u: u ** p * y / ((u - x) ** 2 + y * y), 0.0, u_max, points=points)
        reduced = beta * complex(re, im)
    scale = max(abs(reduced), 1e-300)
    rel_error = abs(two_d - reduced) / scale if reduced != 0 else abs(two_d)
    return TangentReduction(a1, a2, z, two_d, reduced, float(rel_error))


VERTEX_SHAPES = (1, 2, 3, 4)
_VERTEX_SLOPES = {1: (2.0, 0.5), 2: (2.0, 0.5), 3: (0.5, 2.0), 4: (2.0, 0.5)}
# sign of each shape's singular part relative to the wedge 0 < u, beta u < v < alpha u
_VERTEX_WEDGE_SIGN = {1: 1.0, 2: -1.0, 3: -1.0, 4: 1.0}


def _vertex_intervals(shape: int, u: float, slope_a: float, slope_b: float, delta: float):
    if shape == 1:
        return [(slope_b * u, slope_a * u)] if u > 0 else []
    if shape == 2:
        return [(-delta, slope_b * u), (slope_a * u, delta)] if u > 0 else [(-delta, delta)]
    if shape == 3:
        return [(slope_a * u, delta)] if u > 0 else [(slope_b * u, delta)]
    if shape == 4:
        return [(-delta, slope_a * u)] if u > 0 else [(-delta, slope_b * u)]
    raise DomainError(f"Vertex domain shape must be one of {VERTEX_SHAPES}, got {shape}")


def vertex_wedge_coefficient(shape: int, l: int) -> float:
    """Coefficient W of the singular part -W x^n ln|x| + i pi W x^n H(x), n = k + l + 1."""
    slope_a, slope_b = _VERTEX_SLOPES[shape]
    wedge = (slope_a ** (l + 1) - slope_b ** (l + 1)) / (l + 1)
    return _VERTEX_WEDGE_SIGN[shape] * wedge


def vertex_domain_boundary(shape: int, k: int, l: int, x: float,
                           delta: float = 1.0, epsilon: float = 0.4) -> complex:
    """
    Boundary value of int_U u^k v^l / (u - x - i0) du dv for a vertex domain shape.

    Shapes: 1 a wedge in u > 0; 2 its complement in a box; 3 and 4 domains whose
    two boundary lines sit on opposite sides of u = 0, above (3) or below (4)
    the lines. The v integral is done in closed form.
    """
    if shape not in VERTEX_SHAPES:
        raise DomainError(f"Vertex domain shape must be one of {VERTEX_SHAPES}, got {shape}")
    slope_a, slope_b = _VERTEX_SLOPES[shape]

    def column(u: float) -> float:
        total = 0.0
        for lo, hi in _vertex_intervals(shape, u, slope_a, slope_b, delta):
            total += (hi ** (l + 1) - lo ** (l + 1)) / (l + 1)
        return u ** k * total

    fx = column(x)
    # PV by subtraction of the pole; the remaining integrand is bounded
    regular = _quad(lambda u: (column(u) - fx) / (u - x), -epsilon, epsilon,
                    points=sorted({0.0, x}))
    real = regular + fx * math.log((epsilon - x) / (x + epsilon))
    return complex(real, math.pi * fx)


@dataclass
class KernelCheck:
    """One property check of the kernel suite."""
    name: str
    passed: bool
    details: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {"name": self.name, "passed": self.passed, "details": self.details}


@dataclass
class KernelSuiteReport:
    checks: List[KernelCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "n_checks": len(self.checks),
            "n_failed": sum(1 for c in self.checks if not c.passed),
            "checks": [c.to_dict() for c in self.checks],
        }


def _reference_scales(kind: KernelKind) -> Dict[str, float]:
    form = kind.singular_form
    if form is SingularForm.FORM_1A:
        return {"re_log": 1.0, "im_step": math.pi}
    if form is SingularForm.FORM_2:
        return {"re_step": form2_constant(), "im_log": math.pi}
    if form is SingularForm.FORM_1B:
        c1, c2 = form1b_series_constants(kind.alpha)
        return {"re_step_plus": max(1.0, abs(c1)), "re_step_minus": max(1.0, abs(c2)), "im_step": math.pi}
    return {"re_log": 1.0, "im_step": 1.0}


def check_oracle_agreement(kind: KernelKind, tolerance: float = 0.01) -> KernelCheck:
    """Residual of numeric minus closed-form singular part carries no singular component."""
    xs = default_fit_points()
    numeric = np.array([phi_boundary_numeric(kind, float(x)).value for x in xs])
    residual = numeric - phi_singular_form(kind, xs)
    fit = fit_singular_coefficients(xs, residual, kind.singular_form, kind.alpha)
    scales = _reference_scales(kind)
    ratios = {name: abs(coef) / scales[name] for name, coef in fit.coefficients.items()}
    passed = all(r < tolerance for r in ratios.values())
    return KernelCheck(f"oracle:{kind.label}", passed,
                       {"relative_leak": ratios, "fit": fit.to_dict()})


def check_imaginary_law(kind: KernelKind, x: float = 0.5, tolerance: float = 1e-4) -> KernelCheck:
    estimate = phi_boundary_numeric(kind, x)
    expected = math.pi * float(kind.h(x))
    error = abs(estimate.history[-1].imag - expected)
    return KernelCheck(f"imaginary:{kind.label}", error < tolerance,
                       {"x": x, "expected": expected, "measured": estimate.history[-1].imag, "error": error})


def check_sign_rule(kind: KernelKind, tolerance: float = 0.01) -> KernelCheck:
    """Mirrored kernel equals relative_sign times the original up to regular terms."""
    sign = relative_sign(kind.singular_form, int(round(kind.alpha)))
    xs = default_fit_points()
    plus = np.array([phi_boundary_numeric(kind, float(x)).value for x in xs])
    minus = np.array([phi_boundary_numeric(kind, float(x), mirrored=True).value for x in xs])
    fit = fit_singular_coefficients(xs, minus - sign * plus, kind.singular_form, kind.alpha)
    scales = _reference_scales(kind)
    ratios = {name: abs(coef) / scales[name] for name, coef in fit.coefficients.items()}
    near_zero = xs[np.argmin(np.abs(xs))]
    near = abs(phi_boundary_numeric(kind, float(near_zero), mirrored=True).value
               - sign * phi_boundary_numeric(kind, float(near_zero)).value)
    return KernelCheck(f"sign:{kind.label}", all(r < tolerance for r in ratios.values()),
                       {"sign": sign, "relative_leak": ratios, "difference_near_zero": near})


def check_form1b_constants(alpha: float, tolerance: float = 0.01) -> KernelCheck:
    """Constants fitted from the numeric oracle against the series sums."""
    kind = KernelKind.half(alpha)
    xs = default_fit_points()
    numeric = np.array([phi_boundary_numeric(kind, float(x)).value for x in xs])
    fit = fit_singular_coefficients(xs, numeric, SingularForm.FORM_1B, alpha)
    c1, c2 = form1b_series_constants(alpha)
    fitted = (fit.coefficients["re_step_plus"], fit.coefficients["re_step_minus"])
    errors = [abs(f - s) / max(1.0, abs(s)) for f, s in zip(fitted, (c1, c2))]
    return KernelCheck(f"form1b:alpha={alpha:g}", all(e < tolerance for e in errors),
                       {"fitted": list(fitted), "series": [c1, c2], "relative_error": errors})


def check_vertex_domains(k: int = 0, l: int = 0, tolerance: float = 0.01) -> KernelCheck:
    """Every vertex domain shape carries the wedge singular part of its reduction."""
    xs = default_fit_points()
    details = {}
    passed = True
    for shape in VERTEX_SHAPES:
        values = np.array([vertex_domain_boundary(shape, k, l, float(x)) for x in xs])
        fit = fit_singular_coefficients(xs, values, SingularForm.FORM_1A, k + l + 1)
        w = vertex_wedge_coefficient(shape, l)
        expected = {"re_log": -w, "im_step": math.pi * w}
        errors = {name: abs(fit.coefficients[name] - value) / max(1.0, abs(value))
                  for name, value in expected.items()}
        passed &= all(e < tolerance for e in errors.values())
        details[f"U{shape}"] = {"fit": fit.coefficients, "expected": expected, "relative_error": errors}
    return KernelCheck(f"vertex-domains:k={k},l={l}", passed, details)


def check_tangent_reduction(a1: int, a2: int, z: complex = complex(0.3, 1e-2),
                            tolerance: float = 1e-6) -> KernelCheck:
    result = tangent_reduction_check(a1, a2, z)
    if a1 % 2 == 1:
        # no growth as Im z shrinks: the symmetric region kills every order
        smaller = tangent_reduction_check(a1, a2, complex(z.real, z.imag / 10.0))
        passed = abs(result.two_d) < 1e-8 and abs(smaller.two_d) < 1e-8
    else:
        passed = result.rel_error < tolerance
    return KernelCheck(f"tangent-reduction:a1={a1},a2={a2}", passed, result.to_dict())


def run_kernel_suite(alphas: Sequence[int] = (0, 1, 2)) -> KernelSuiteReport:
    """
    Run every kernel property check.

    Returns:
        KernelSuiteReport; `passed` is true when all checks pass
    """
    report = KernelSuiteReport()
    for alpha in alphas:
        for kind in (KernelKind.full(alpha), KernelKind.half(alpha), KernelKind.log(alpha)):
            report.checks.append(check_oracle_agreement(kind))
        report.checks.append(check_imaginary_law(KernelKind.half(alpha)))
        report.checks.append(check_sign_rule(KernelKind.half(alpha)))
        report.checks.append(check_sign_rule(KernelKind.log(alpha)))
    for alpha in (0.5, -0.5):
        report.checks.append(check_oracle_agreement(KernelKind.half(alpha)))
        report.checks.append(check_form1b_constants(alpha))
    report.checks.append(check_vertex_domains())
    for a1, a2 in ((0, 0), (0, 1), (2, 0), (1, 0)):
        report.checks.append(check_tangent_reduction(a1, a2))
    failed = [c.name for c in report.checks if not c.passed]
    if failed:
        logger.warning(f"Kernel suite: {len(failed)} failed checks: {', '.join(failed)}")
    else:
        logger.info(f"Kernel suite: all {len(report.checks)} checks passed")
    return report
