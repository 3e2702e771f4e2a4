import math

import numpy as np
import pytest

from algebraic_damping.errors import DomainError
from algebraic_damping.fields import (
    ActionDomain,
    CompositeToy,
    Edge,
    IsochroneCosCos,
    IsochroneModel,
    Mode,
    NuOrders,
    Observable,
    Parity,
    TangentToy,
    ToyFactorized,
    VertexToy,
    eval_frequency,
    eval_isochrone_f0,
    eval_perturbation_g,
    isochrone_f0_from_e,
)


def test_zero_mode_rejected():
    with pytest.raises(DomainError):
        Mode(0, 0)


def test_mode_parse():
    assert Mode.parse(" 2, -1") == Mode(2, -1)
    assert str(Mode(3, -2)) == "3,-2"
    assert Mode(1, -1).negated() == Mode(-1, 1)
    with pytest.raises(DomainError):
        Mode.parse("1")
    with pytest.raises(DomainError):
        Mode.parse("a,b")


def test_toy_observables():
    a3 = Observable.toy("a3")
    assert a3.n == Mode(1, -1)
    assert a3.parity is Parity.COS
    assert a3.name == "A3"
    assert Observable.toy("A2").parity is Parity.SIN
    with pytest.raises(DomainError):
        Observable.toy("A5")


def test_domain_nodes_and_area():
    domain = ActionDomain.toy(4, cutoff=2.0)
    j1, j2 = domain.nodes()
    assert np.allclose(j1, [0.25, 0.75, 1.25, 1.75])
    assert domain.cell_area == pytest.approx(0.25)
    assert domain.physical_edges() == [Edge.J1_MIN, Edge.J2_MIN]
    assert [c[0] for c in domain.corners()] == [(0.0, 0.0)]


def test_domain_rejects_empty_range():
    with pytest.raises(DomainError):
        ActionDomain(1.0, 1.0, 0.0, 1.0)


def test_vertex_and_tangent_frequencies():
    assert eval_frequency(VertexToy(), (0.3, 0.7)) == (0.3, 0.7)
    assert eval_frequency(TangentToy(), (3.0, 2.0)) == (4.0, 2.0)
    o1, o2 = eval_frequency(CompositeToy(), (1.0, 0.5))
    assert o1 == pytest.approx(-1.0 - 0.5 - 1.0)
    assert o2 == pytest.approx(-2.0 + 1.0)


def test_composite_mode_frequencies():
    model = CompositeToy()
    s = np.linspace(0.0, 10.0, 11)
    # (1,1) is constant on the J1 = 0 edge
    assert np.allclose(model.mode_frequency(Mode(1, 1), 0.0, s), 0.0)
    # (1,-1) has a stationary tangential derivative at J1 = 1 on J2 = 0
    grad = model.mode_gradient(Mode(1, -1), 1.0, 0.0)
    assert float(grad[0]) == pytest.approx(0.0)
    assert float(model.mode_frequency(Mode(1, -1), 1.0, 0.0)) == pytest.approx(0.5)


def test_isochrone_origin():
    model = IsochroneModel()
    assert eval_frequency(model, (0.0, 0.0)) == pytest.approx((0.5, 1.0))
    assert float(model.hamiltonian(0.0, 0.0)) == pytest.approx(-0.5)
    assert float(model.e_tilde(0.0, 0.0)) == pytest.approx(0.5)


def test_isochrone_rejects_negative_actions():
    with pytest.raises(DomainError):
        eval_frequency(IsochroneModel(), (-1.0, 0.0))


@pytest.mark.parametrize("param", ["G", "M", "b"])
def test_isochrone_rejects_non_positive_parameters(param):
    with pytest.raises(DomainError):
        IsochroneModel(**{param: 0.0})


@pytest.mark.parametrize("point", [(0.3, 0.2), (2.0, 1.5), (7.0, 0.1)])
def test_isochrone_jacobian_matches_finite_differences(point):
    model = IsochroneModel(G=1.0, M=2.0, b=0.5)
    jac = model.jacobian(*point)
    hess = model.hessian(*point)
    h = 1e-6
    for k in range(2):
        step = np.zeros(2)
        step[k] = h
        plus = np.array(model.omega(*(np.array(point) + step)))
        minus = np.array(model.omega(*(np.array(point) - step)))
        assert np.allclose(jac[:, k], (plus - minus) / (2 * h), rtol=1e-6, atol=1e-9)
        jac_plus = model.jacobian(*(np.array(point) + step))
        jac_minus = model.jacobian(*(np.array(point) - step))
        assert np.allclose(hess[:, :, k], (jac_plus - jac_minus) / (2 * h), rtol=1e-5, atol=1e-8)


def test_isochrone_f0_domain():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            eval_isochrone_f0(bad)
    with pytest.raises(DomainError):
        eval_isochrone_f0(0.25, b=-1.0)
    assert eval_isochrone_f0(0.25) > 0.0


def test_isochrone_f0_series_branch_is_continuous():
    below = isochrone_f0_from_e(np.array([1e-3 * (1 - 1e-9)]))[0]
    above = isochrone_f0_from_e(np.array([1e-3 * (1 + 1e-9)]))[0]
    assert below == pytest.approx(above, rel=1e-6)


def test_toy_weight_at_origin():
    spec = ToyFactorized()
    assert eval_perturbation_g(spec, (1, 1), (0.0, 0.0)) == pytest.approx(0.25)
    assert eval_perturbation_g(spec, (0, 0), (0.0, 0.0)) == 0.0
    assert eval_perturbation_g(spec, (2, 1), (0.0, 0.0)) == 0.0
    assert float(spec.weight(Mode(1, 1), 0.0, 0.0)) == pytest.approx(math.pi ** 2)


def test_toy_rejects_negative_orders():
    with pytest.raises(DomainError):
        ToyFactorized(a1=-1)


def test_toy_local_orders():
    spec = ToyFactorized(h1=2, a1=1, j1_star=1.0)
    assert spec.local_orders((1.0, 0.0)) == NuOrders(1, 0, (1, 2))
    assert spec.local_orders((0.0, 0.0)) == NuOrders(2, 0, (1, 2))
    assert spec.local_orders((0.5, 0.5)) == NuOrders(0, 0, (1, 1))


def test_isochrone_perturbation_support():
    spec = IsochroneCosCos(n2=2, n3=-1)
    assert spec.supports(Mode(2, -1))
    assert spec.supports(Mode(-2, 1))
    assert not spec.supports(Mode(1, 1))
    assert float(spec.weight(Mode(1, 1), 1.0, 1.0)) == 0.0
    with pytest.raises(DomainError):
        IsochroneCosCos(n2=0, n3=0)
