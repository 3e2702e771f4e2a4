"""
Decay exponents, spectra and verdicts from time series.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import fft, signal, stats

from .atlas import DampingLaw, ObservablePrediction
from .errors import AnalysisError, EmptyEnvelope, InsufficientData
from .evolve import TimeSeries

logger = logging.getLogger(__name__)

MIN_ENVELOPE_SAMPLES = 8
MIN_SPECTRUM_SAMPLES = 64
MIN_FIT_PEAKS = 4
MIN_SIGN_CHANGES = 4


@dataclass(frozen=True)
class ExponentFit:
    """Slope of log|envelope| against log t."""
    exponent: float
    stderr: float
    window: Tuple[float, float]
    n_peaks_used: int
    r_squared: float
    intercept: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exponent": self.exponent,
            "stderr": self.stderr,
            "window": list(self.window),
            "n_peaks_used": self.n_peaks_used,
            "r_squared": self.r_squared,
            "intercept": self.intercept,
        }


@dataclass(frozen=True)
class SpectrumPeak:
    frequency: float
    power: float
    resolution: float
    prominence: float = 0.0

    @property
    def dominant(self) -> bool:
        """Stands out by at least half its own power."""
        return self.prominence >= 0.5 * self.power

    def to_dict(self) -> Dict[str, Any]:
        return {"frequency": self.frequency, "power": self.power, "resolution": self.resolution,
                "prominence": self.prominence, "dominant": self.dominant}


@dataclass(frozen=True)
class Spectrum:
    """One-sided power of a windowed series plus its peaks, strongest first."""
    frequencies: np.ndarray
    power: np.ndarray
    peaks: List[SpectrumPeak]
    resolution: float
    window: Tuple[float, float]
    n_samples: int

    def top_nonzero_peak(self) -> Optional[SpectrumPeak]:
        """Strongest peak clear of the zero-frequency main lobe."""
        for peak in self.peaks:
            if peak.frequency > 2.0 * self.resolution:
                return peak
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {"window": list(self.window), "n_samples": self.n_samples,
                "resolution": self.resolution, "peaks": [p.to_dict() for p in self.peaks]}


@dataclass(frozen=True)
class Tolerances:
    exponent: float = 0.1
    frequency: float = 0.006
    zero_level: float = 1e-10
    cancelled_exponent: float = 4.5
    noise_floor: float = 0.1

    def frequency_tolerance(self, resolution: float) -> float:
        return max(resolution, self.frequency)

    def to_dict(self) -> Dict[str, Any]:
        return {"exponent": self.exponent, "frequency": self.frequency, "zero_level": self.zero_level,
                "cancelled_exponent": self.cancelled_exponent, "noise_floor": self.noise_floor}


@dataclass
class Verdict:
    """Prediction against measurement; every check is recorded with both sides."""
    passed: bool
    predicted: Dict[str, Any]
    measured: Dict[str, Any]
    checks: Dict[str, bool] = field(default_factory=dict)
    reasons: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "predicted": self.predicted, "measured": self.measured,
                "checks": self.checks, "reasons": self.reasons}


@dataclass(frozen=True)
class ReferenceMatch:
    max_deviation: float
    n_points: int
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"max_deviation": self.max_deviation, "n_points": self.n_points, "passed": self.passed}


def _refine_vertex(y0: float, y1: float, y2: float) -> Tuple[float, float]:
    """Offset (in samples) and height of the parabola through three points."""
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return 0.0, y1
    delta = float(np.clip(0.5 * (y0 - y2) / denom, -0.5, 0.5))
    return delta, y1 - 0.25 * (y0 - y2) * delta


def _sign_changes(values: np.ndarray) -> np.ndarray:
    """Indices i with a sign change between sample i and the next non-zero sample."""
    nonzero = np.flatnonzero(values != 0.0)
    signs = np.sign(values[nonzero])
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    return nonzero[flips]


def envelope(series: TimeSeries) -> List[Tuple[float, float]]:
    """
    Peak amplitudes of a series as (t, |value|) pairs.

    Oscillating series give one refined maximum of |value| per complete lobe
    between sign changes. With one to three sign changes the maxima over
    fixed-width windows are used instead; without any sign change the series
    is its own envelope.

    Args:
        series: Time series with at least 8 samples

    Returns:
        List of (t, amplitude) in increasing t
    """
    values = series.values
    if values.size < MIN_ENVELOPE_SAMPLES:
        raise InsufficientData(f"Envelope needs at least {MIN_ENVELOPE_SAMPLES} samples, got {values.size}")
    if not np.any(values):
        raise EmptyEnvelope("Series is identically zero")

    times = series.times
    magnitude = np.abs(values)
    changes = _sign_changes(values)

    if changes.size == 0:
        keep = magnitude > 0.0
        return list(zip(times[keep].tolist(), magnitude[keep].tolist()))

    if changes.size < MIN_SIGN_CHANGES:
        width = max(MIN_ENVELOPE_SAMPLES, values.size // 16)
        peaks = []
        for start in range(0, values.size, width):
            chunk = magnitude[start:start + width]
            i = start + int(np.argmax(chunk))
            if magnitude[i] > 0.0:
                peaks.append((float(times[i]), float(magnitude[i])))
        logger.debug(f"Only {changes.size} sign changes; windowed maxima give {len(peaks)} peaks")
        return peaks

    peaks = []
    for left, right in zip(changes[:-1], changes[1:]):
        lobe = slice(left + 1, right + 1)
        i = left + 1 + int(np.argmax(magnitude[lobe]))
        if 0 < i < values.size - 1:
            delta, height = _refine_vertex(magnitude[i - 1], magnitude[i], magnitude[i + 1])
        else:
            delta, height = 0.0, magnitude[i]
        peaks.append((float(times[i] + delta * series.dt), float(height)))
    return peaks


def fit_decay_exponent(series: TimeSeries, window: Tuple[float, float]) -> ExponentFit:
    """
    Fit |envelope| ~ C t^exponent over a time window.

    Args:
        series: Time series
        window: (t_min, t_max) inside the series span

    Returns:
        ExponentFit from a least-squares line in log-log space
    """
    t_min, t_max = float(window[0]), float(window[1])
    if not t_min < t_max:
        raise AnalysisError(f"Fit window must satisfy t_min < t_max, got {window}")
    slack = 1e-9 * series.dt
    if t_min < series.t0 - slack or t_max > series.t_end + slack or t_min <= 0.0:
        raise AnalysisError(
            f"Fit window {window} outside series span [{series.t0}, {series.t_end}] or not positive")

    peaks = [(t, a) for t, a in envelope(series) if t_min <= t <= t_max and a > 0.0]
    if not peaks:
        raise EmptyEnvelope(f"No envelope points inside window {window}")
    if len(peaks) < MIN_FIT_PEAKS:
        raise InsufficientData(f"Only {len(peaks)} envelope points inside {window}; need {MIN_FIT_PEAKS}")

    log_t = np.log([t for t, _ in peaks])
    log_a = np.log([a for _, a in peaks])
    result = stats.linregress(log_t, log_a)
    fit = ExponentFit(
        exponent=float(result.slope),
        stderr=float(result.stderr),
        window=(t_min, t_max),
        n_peaks_used=len(peaks),
        r_squared=float(result.rvalue ** 2),
        intercept=float(result.intercept),
    )
    logger.debug(f"Fitted exponent {fit.exponent:.4f} +- {fit.stderr:.2g} from {fit.n_peaks_used} points")
    return fit


def dft_power(values: Sequence[float]) -> np.ndarray:
    """Two-sided power |X_k|^2 / n; sums to sum(values**2)."""
    x = np.asarray(values, dtype=float)
    return np.abs(fft.fft(x)) ** 2 / x.size


def spectrum(series: TimeSeries, t_window: Optional[Tuple[float, float]] = None,
             max_peaks: int = 32) -> Spectrum:
    """
    Rectangular-window power spectrum with refined peaks.

    Args:
        series: Time series
        t_window: (t_min, t_max); the whole series when omitted
        max_peaks: Number of peaks kept

    Returns:
        Spectrum with frequencies in radians per unit time
    """
    if t_window is None:
        t_window = (series.t0, series.t_end)
    _, values = series.window(*t_window)
    n = values.size
    if n < MIN_SPECTRUM_SAMPLES:
        raise InsufficientData(f"Spectrum window {t_window} holds {n} samples; need {MIN_SPECTRUM_SAMPLES}")

    power = np.abs(fft.rfft(values)) ** 2 / n
    resolution = 2.0 * math.pi / (n * series.dt)
    frequencies = resolution * np.arange(power.size)
    nyquist = math.pi / series.dt

    # power is even in frequency: mirror both ends so bin 0 and Nyquist can be peaks
    head = power[1:][::-1]
    extended = np.concatenate([head, power, power[:-1][::-1]])
    offset = head.size
    indices, props = signal.find_peaks(extended, prominence=0.0)

    peaks = []
    for idx, prominence in zip(indices, props["prominences"]):
        k = idx - offset
        if not 0 <= k < power.size:
            continue
        delta, height = _refine_vertex(extended[idx - 1], extended[idx], extended[idx + 1])
        frequency = float(np.clip((k + delta) * resolution, 0.0, nyquist))
        peaks.append(SpectrumPeak(frequency, float(height), resolution, float(prominence)))
    peaks.sort(key=lambda p: p.power, reverse=True)

    logger.debug(f"Spectrum of {n} samples: resolution {resolution:.4g}, {len(peaks)} peaks")
    return Spectrum(frequencies, power, peaks[:max_peaks], resolution,
                    (float(t_window[0]), float(t_window[1])), n)


def power_spectrum(series: TimeSeries, t_window: Optional[Tuple[float, float]] = None) -> List[SpectrumPeak]:
    """Peaks of the windowed power spectrum, sorted by power."""
    return spectrum(series, t_window).peaks


def _dominant_nonzero(peaks: Sequence[SpectrumPeak], tol: Tolerances) -> Optional[SpectrumPeak]:
    if not peaks:
        return None
    top_power = max(p.power for p in peaks)
    for peak in sorted(peaks, key=lambda p: p.power, reverse=True):
        if peak.frequency <= 2.0 * peak.resolution:
            continue
        if peak.dominant and peak.power >= tol.noise_floor * top_power:
            return peak
    return None


def _predicted(prediction: Union[DampingLaw, ObservablePrediction]) -> Dict[str, Any]:
    if isinstance(prediction, ObservablePrediction):
        return {"power": prediction.power, "omega0": prediction.omega0, "label": prediction.label,
                "all_orders_cancelled": prediction.all_orders_cancelled}
    return {"power": prediction.power, "omega0": prediction.omega0, "label": None,
            "all_orders_cancelled": prediction.vanishes or prediction.power is None}


def compare(prediction: Union[DampingLaw, ObservablePrediction],
            fit: Optional[ExponentFit],
            peaks: Optional[Sequence[SpectrumPeak]],
            tolerances: Optional[Tolerances] = None,
            series_max: Optional[float] = None) -> Verdict:
    """
    Check a measured decay against a predicted law.

    The exponent must match within tolerance. A non-oscillating prediction must
    show no dominant nonzero spectral peak; an oscillating one must have its
    strongest nonzero peak at omega0; passing peaks=None skips the spectral
    check. A prediction cancelled at every order
    passes when the series stays below the zero level or decays faster than
    the cancelled-cell threshold.
    """
    tol = tolerances or Tolerances()
    predicted = _predicted(prediction)
    measured: Dict[str, Any] = {
        "exponent": fit.exponent if fit else None,
        "stderr": fit.stderr if fit else None,
        "series_max": series_max,
    }
    checks: Dict[str, bool] = {}
    reasons: List[str] = []

    if predicted["all_orders_cancelled"]:
        below_zero = series_max is not None and series_max < tol.zero_level
        fast = fit is not None and fit.exponent <= -tol.cancelled_exponent
        checks["cancelled"] = below_zero or fast
        if not checks["cancelled"]:
            reasons.append(f"expected cancellation: max |value| below {tol.zero_level:g} "
                           f"or decay faster than t^-{tol.cancelled_exponent:g}")
        return Verdict(checks["cancelled"], predicted, measured, checks, reasons)

    power = predicted["power"]
    if fit is None:
        checks["exponent"] = False
        reasons.append("no exponent fit available")
    else:
        checks["exponent"] = abs(fit.exponent + power) <= tol.exponent
        if not checks["exponent"]:
            reasons.append(f"exponent {fit.exponent:.4f} differs from -{power:g} by more than {tol.exponent:g}")

    omega0 = predicted["omega0"]
    if peaks is not None and omega0 == 0.0:
        stray = _dominant_nonzero(peaks, tol)
        measured["dominant_peak"] = stray.to_dict() if stray else None
        checks["frequency"] = stray is None
        if stray is not None:
            reasons.append(f"unexpected dominant peak at {stray.frequency:.4f}")
    elif peaks is not None:
        nonzero = [p for p in sorted(peaks, key=lambda p: p.power, reverse=True)
                   if p.frequency > 2.0 * p.resolution]
        top = nonzero[0] if nonzero else None
        measured["top_peak"] = top.to_dict() if top else None
        if top is None:
            checks["frequency"] = False
            reasons.append(f"no nonzero spectral peak; expected {omega0:.4f}")
        else:
            allowed = tol.frequency_tolerance(top.resolution)
            checks["frequency"] = abs(top.frequency - omega0) <= allowed
            if not checks["frequency"]:
                reasons.append(f"frequency mismatch: peak {top.frequency:.4f} vs predicted {omega0:.4f}")

    passed = all(checks.values())
    logger.info(f"Verdict {'pass' if passed else 'fail'}: predicted {predicted}, measured exponent "
                f"{measured['exponent']}")
    return Verdict(passed, predicted, measured, checks, reasons)


def match_reference(series: TimeSeries,
                    reference: Callable[[np.ndarray], np.ndarray],
                    t_min: float,
                    rel_tol: float = 0.05) -> ReferenceMatch:
    """
    Pointwise distance to a closed-form guide curve, relative to the local envelope.

    Args:
        series: Time series
        reference: Vectorized guide curve of t
        t_min: Only samples with t >= t_min are compared
        rel_tol: Allowed deviation as a fraction of the envelope

    Returns:
        ReferenceMatch with the largest relative deviation
    """
    times, values = series.window(t_min, series.t_end)
    if times.size == 0:
        raise InsufficientData(f"No samples after t={t_min}")
    peaks = envelope(series)
    env_t = np.array([t for t, _ in peaks])
    env_a = np.array([a for _, a in peaks])
    scale = np.interp(times, env_t, env_a)
    if np.any(scale <= 0.0):
        raise EmptyEnvelope(f"Envelope vanishes after t={t_min}")
    deviation = float(np.max(np.abs(values - reference(times)) / scale))
    return ReferenceMatch(deviation, int(times.size), deviation <= rel_tol)
