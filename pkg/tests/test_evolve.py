import math

import numpy as np
import pytest
from scipy import special

from algebraic_damping.cache import PhaseFieldCache
from algebraic_damping.errors import AnalysisError, DomainError
from algebraic_damping.evolve import (
    QuadratureConfig,
    QuadratureScheduler,
    TimeSeries,
    evolve_series,
    expected_value,
)
from algebraic_damping.fields import (
    ActionDomain,
    CriticalToy,
    Mode,
    Observable,
    Parity,
    ToyFactorized,
    VertexToy,
)


def vertex_a1_exact(t):
    """pi^2 (C^2 - S^2) for the Gaussian weight over the quarter plane."""
    c = math.sqrt(math.pi / 2.0) * math.exp(-0.5 * t * t)
    s = math.sqrt(2.0) * special.dawsn(t / math.sqrt(2.0))
    return math.pi ** 2 * (c * c - s * s)


def test_quadrature_bins_range():
    with pytest.raises(DomainError):
        QuadratureConfig.toy(bins=128)
    with pytest.raises(DomainError):
        QuadratureConfig.toy(bins=2 ** 15)
    assert QuadratureConfig.for_model(VertexToy(), 512).bins == 512


def test_initial_value(small_quad, toy_spec):
    sample = expected_value(VertexToy(), toy_spec, Observable.toy("A1"), 0.0, small_quad)
    assert sample.value == pytest.approx(math.pi ** 3 / 2.0, rel=1e-6)
    assert not sample.under_resolved
    sin_sample = expected_value(VertexToy(), toy_spec, Observable.toy("A2"), 0.0, small_quad)
    assert sin_sample.value == 0.0


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_matches_closed_form(small_quad, toy_spec, scheduler, t):
    sample = scheduler.expected_value(VertexToy(), toy_spec, Observable.toy("A1"), t, small_quad)
    assert sample.value == pytest.approx(vertex_a1_exact(t), rel=2e-3)


def test_result_independent_of_worker_count(small_quad, toy_spec):
    observable = Observable.toy("A3")
    with QuadratureScheduler(max_workers=1) as one, QuadratureScheduler(max_workers=4) as four:
        a = one.evolve_series(VertexToy(), toy_spec, observable, 1.0, 0.5, 20, small_quad)
        b = four.evolve_series(VertexToy(), toy_spec, observable, 1.0, 0.5, 20, small_quad)
    assert np.array_equal(a.values, b.values)


def test_series_metadata_and_flags(small_quad, toy_spec, scheduler):
    # t_max = bins / (extent * max|grad mu|) = 256 / 10
    series = scheduler.evolve_series(VertexToy(), toy_spec, Observable.toy("A1"), 20.0, 2.0, 5, small_quad)
    assert series.metadata["t_max_resolved"] == pytest.approx(25.6)
    assert series.under_resolved.tolist() == [False, False, False, True, True]
    assert series.n_under_resolved == 2
    assert series.metadata["observable"]["name"] == "A1"
    assert series.metadata["model"]["name"] == "vertex-toy"


def test_exchange_symmetric_observable_vanishes(small_quad, scheduler):
    spec = ToyFactorized(h1=2, h2=2, j1_star=1.0, j2_star=1.0)
    for t in (3.0, 17.0, 41.5):
        sample = scheduler.expected_value(CriticalToy(), spec, Observable.toy("A4"), t, small_quad)
        assert abs(sample.value) < 1e-10


def test_invalid_arguments(small_quad, toy_spec, scheduler):
    with pytest.raises(DomainError):
        scheduler.expected_value(VertexToy(), toy_spec, Observable.toy("A1"), -1.0, small_quad)
    with pytest.raises(DomainError):
        scheduler.expected_value(VertexToy(), toy_spec, Observable(Mode(2, 1), Parity.COS), 1.0, small_quad)
    with pytest.raises(DomainError):
        scheduler.evolve_series(VertexToy(), toy_spec, Observable.toy("A1"), 0.0, 0.0, 10, small_quad)
    with pytest.raises(DomainError):
        scheduler.evolve_series(VertexToy(), toy_spec, Observable.toy("A1"), 0.0, 1.0, 1, small_quad)


def test_module_level_evolve(small_quad, toy_spec):
    series = evolve_series(VertexToy(), toy_spec, Observable.toy("A1"), 0.0, 1.0, 3, small_quad)
    assert len(series) == 3
    assert series.values[0] == pytest.approx(math.pi ** 3 / 2.0, rel=1e-6)


def test_time_series_validation():
    with pytest.raises(AnalysisError):
        TimeSeries(0.0, 0.0, np.zeros(4))
    with pytest.raises(AnalysisError):
        TimeSeries(0.0, 1.0, np.zeros(1))
    with pytest.raises(AnalysisError):
        TimeSeries(0.0, 1.0, np.zeros((2, 2)))
    series = TimeSeries(1.0, 0.5, np.arange(5.0))
    assert series.t_end == 3.0
    times, values = series.window(1.5, 2.5)
    assert times.tolist() == [1.5, 2.0, 2.5]
    assert values.tolist() == [1.0, 2.0, 3.0]


def test_cache_reuses_fields(small_quad, toy_spec):
    cache = PhaseFieldCache()
    first = cache.fields(VertexToy(), toy_spec, Mode(1, 1), small_quad)
    assert cache.stats()["misses"] == 3
    second = cache.fields(VertexToy(), toy_spec, Mode(1, 1), small_quad)
    assert second.phase is first.phase
    assert second.weight is first.weight
    assert cache.stats()["misses"] == 3
    assert not first.phase.flags.writeable
    assert first.n_tiles == 2


def test_cache_evicts_oldest():
    cache = PhaseFieldCache(max_entries=2)
    quad = QuadratureConfig.toy(bins=256)
    cache.phase(VertexToy(), Mode(1, 1), quad)
    cache.phase(VertexToy(), Mode(1, -1), quad)
    cache.phase(VertexToy(), Mode(-1, 1), quad)
    assert cache.stats()["entries"] == 2
    cache.phase(VertexToy(), Mode(1, 1), quad)
    assert cache.misses == 4
    cache.clear()
    assert cache.stats()["entries"] == 0


@pytest.mark.slow
def test_vertex_decay_exponent_from_evolution():
    from algebraic_damping.analysis import fit_decay_exponent

    quad = QuadratureConfig(ActionDomain.toy(2048))
    with QuadratureScheduler() as pool:
        series = pool.evolve_series(VertexToy(), ToyFactorized(), Observable.toy("A1"), 10.0, 1.0, 91, quad)
    assert series.n_under_resolved == 0
    fit = fit_decay_exponent(series, (10.0, 100.0))
    assert fit.exponent == pytest.approx(-2.0, abs=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("t", [2.0, 5.0])
def test_grid_doubling_converges(toy_spec, t):
    observable = Observable.toy("A1")
    with QuadratureScheduler(max_workers=2) as pool:
        coarse = pool.expected_value(VertexToy(), toy_spec, observable, t, QuadratureConfig.toy(bins=2048))
        fine = pool.expected_value(VertexToy(), toy_spec, observable, t, QuadratureConfig.toy(bins=4096))
    assert not fine.under_resolved
    assert coarse.value == pytest.approx(fine.value, rel=1e-4)
    assert fine.value == pytest.approx(vertex_a1_exact(t), rel=1e-4)
