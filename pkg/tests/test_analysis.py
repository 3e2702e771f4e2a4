import numpy as np
import pytest

from algebraic_damping.analysis import (
    Tolerances,
    compare,
    dft_power,
    envelope,
    fit_decay_exponent,
    match_reference,
    power_spectrum,
    spectrum,
)
from algebraic_damping.atlas import DampingLaw, SingularityKind, predict_observable
from algebraic_damping.errors import AnalysisError, EmptyEnvelope, InsufficientData
from algebraic_damping.evolve import TimeSeries
from algebraic_damping.fields import ActionDomain, Observable, ToyFactorized, VertexToy

from conftest import make_series


def oscillating_law(power, omega0):
    return DampingLaw(SingularityKind.TANGENT, power, omega0, None, True, True)


def test_monotone_series_is_its_own_envelope():
    series = make_series(lambda t: t ** -2.0, n=200)
    peaks = envelope(series)
    assert len(peaks) == 200
    fit = fit_decay_exponent(series, (10.0, 200.0))
    assert fit.exponent == pytest.approx(-2.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)


def test_oscillating_series_exponent():
    series = make_series(lambda t: t ** -1.5 * np.cos(0.5 * t))
    fit = fit_decay_exponent(series, (100.0, 1000.0))
    assert fit.exponent == pytest.approx(-1.5, abs=0.05)
    assert fit.n_peaks_used > 100


def test_envelope_errors():
    with pytest.raises(InsufficientData):
        envelope(TimeSeries(0.0, 1.0, np.ones(5)))
    with pytest.raises(EmptyEnvelope):
        envelope(TimeSeries(0.0, 1.0, np.zeros(50)))


def test_fit_window_errors():
    series = make_series(lambda t: t ** -2.0, n=100)
    with pytest.raises(AnalysisError):
        fit_decay_exponent(series, (50.0, 20.0))
    with pytest.raises(AnalysisError):
        fit_decay_exponent(series, (10.0, 500.0))
    with pytest.raises(InsufficientData):
        fit_decay_exponent(series, (10.0, 12.0))


def test_dft_power_parseval():
    values = np.sin(0.7 * np.arange(128)) + 0.1
    assert np.sum(dft_power(values)) == pytest.approx(np.sum(values ** 2))


def test_spectrum_peak_location():
    series = make_series(lambda t: np.cos(0.3 * t), n=1024)
    result = spectrum(series)
    assert result.resolution == pytest.approx(2 * np.pi / 1024)
    top = result.top_nonzero_peak()
    assert top.frequency == pytest.approx(0.3, abs=result.resolution)
    assert top.dominant
    peaks = power_spectrum(series)
    assert [p.power for p in peaks] == sorted((p.power for p in peaks), reverse=True)


def test_spectrum_needs_enough_samples():
    series = make_series(lambda t: np.cos(t), n=100)
    with pytest.raises(InsufficientData):
        spectrum(series, (1.0, 30.0))


def test_compare_oscillating_prediction():
    series = make_series(lambda t: t ** -1.5 * np.cos(0.3 * t))
    fit = fit_decay_exponent(series, (100.0, 1000.0))
    peaks = spectrum(series, (100.0, 1000.0)).peaks
    verdict = compare(oscillating_law(1.5, 0.3), fit, peaks)
    assert verdict.passed, verdict.reasons
    wrong = compare(oscillating_law(1.5, 0.6), fit, peaks)
    assert not wrong.passed
    assert not wrong.checks["frequency"]


def test_compare_non_oscillating_prediction(small_domain):
    prediction = predict_observable(VertexToy(), ToyFactorized(), Observable.toy("A1"), small_domain)
    monotone = make_series(lambda t: -3.0 * t ** -2.0)
    fit = fit_decay_exponent(monotone, (100.0, 1000.0))
    verdict = compare(prediction, fit, spectrum(monotone, (100.0, 1000.0)).peaks)
    assert verdict.passed, verdict.reasons

    ringing = make_series(lambda t: t ** -2.0 * np.cos(0.3 * t))
    ring_fit = fit_decay_exponent(ringing, (100.0, 1000.0))
    stray = compare(prediction, ring_fit, spectrum(ringing, (100.0, 1000.0)).peaks)
    assert not stray.passed
    assert any("unexpected dominant peak" in r for r in stray.reasons)


def test_compare_exponent_mismatch_without_spectrum():
    series = make_series(lambda t: t ** -1.0)
    fit = fit_decay_exponent(series, (100.0, 1000.0))
    verdict = compare(oscillating_law(2.0, 0.0), fit, None)
    assert not verdict.passed
    assert "frequency" not in verdict.checks


def test_compare_cancelled_prediction(small_domain):
    prediction = predict_observable(VertexToy(), ToyFactorized(), Observable.toy("A2"), small_domain)
    assert prediction.all_orders_cancelled
    assert compare(prediction, None, None, series_max=1e-13).passed
    slow = make_series(lambda t: t ** -2.0)
    fit = fit_decay_exponent(slow, (100.0, 1000.0))
    assert not compare(prediction, fit, None, series_max=1e-4).passed
    fast = make_series(lambda t: t ** -5.0)
    fast_fit = fit_decay_exponent(fast, (100.0, 1000.0))
    assert compare(prediction, fast_fit, None, Tolerances(), series_max=1e-10).passed


def test_match_reference():
    def guide(t):
        return 4.0 * t ** -1.5 * np.cos(0.5 * (t - 4.8))

    series = make_series(guide)
    assert match_reference(series, guide, 100.0).passed
    off = match_reference(series, lambda t: 1.3 * guide(t), 100.0)
    assert not off.passed
    assert off.max_deviation > 0.2
