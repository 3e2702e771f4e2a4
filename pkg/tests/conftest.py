import numpy as np
import pytest

from algebraic_damping.evolve import QuadratureConfig, QuadratureScheduler, TimeSeries
from algebraic_damping.fields import ActionDomain, ToyFactorized

SMALL_BINS = 2 ** 8


@pytest.fixture
def small_domain():
    return ActionDomain.toy(SMALL_BINS)


@pytest.fixture
def small_quad():
    return QuadratureConfig.toy(bins=SMALL_BINS)


@pytest.fixture
def toy_spec():
    return ToyFactorized()


@pytest.fixture
def scheduler():
    with QuadratureScheduler(max_workers=2) as pool:
        yield pool


def make_series(func, t0=1.0, dt=1.0, n=1000):
    times = t0 + dt * np.arange(n)
    return TimeSeries(t0=t0, dt=dt, values=func(times))
