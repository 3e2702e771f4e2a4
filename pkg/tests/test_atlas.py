import pytest

from algebraic_damping.atlas import (
    SingularityKind,
    SingularityPoint,
    classify,
    exchange_antisymmetric,
    infinity_exponents,
    predict_damping,
    predict_observable,
    resolve_cancellation,
    tangent_equation,
    tangent_point_isochrone,
)
from algebraic_damping.errors import DivergentIntegral, NoTangentPoint, UnsupportedSingularity
from algebraic_damping.fields import (
    ActionDomain,
    CompositeToy,
    CriticalToy,
    IsochroneCosCos,
    IsochroneModel,
    Mode,
    NuOrders,
    Observable,
    Parity,
    ShiftedVertexToy,
    TangentToy,
    ToyFactorized,
    VertexToy,
)


def kinds(points):
    return [p.kind for p in points]


def test_vertex_toy_has_single_vertex(small_domain):
    points = classify(VertexToy(), Mode(1, 1), small_domain)
    assert kinds(points) == [SingularityKind.VERTEX]
    assert points[0].location == (0.0, 0.0)
    assert points[0].x0 == 0.0
    assert points[0].mu_parity_pure


def test_tangent_toy_inventory(small_domain):
    points = classify(TangentToy(), Mode(1, 1), small_domain, ToyFactorized(h1=2, j1_star=1.0))
    by_kind = {p.kind: p for p in points}
    assert set(by_kind) == {SingularityKind.VERTEX, SingularityKind.TANGENT}
    assert by_kind[SingularityKind.TANGENT].location == pytest.approx((1.0, 0.0))
    assert by_kind[SingularityKind.VERTEX].x0 == pytest.approx(1.0)


def test_critical_toy_has_extremum(small_domain):
    points = classify(CriticalToy(), Mode(1, 1), small_domain)
    critical = [p for p in points if p.kind.is_critical]
    assert len(critical) == 1
    assert critical[0].kind is SingularityKind.CRITICAL_EXTREMUM
    assert critical[0].location == pytest.approx((1.0, 1.0))
    saddle = [p for p in classify(CriticalToy(), Mode(1, -1), small_domain) if p.kind.is_critical]
    assert saddle[0].kind is SingularityKind.CRITICAL_SADDLE


def test_composite_line_and_tangent(small_domain):
    points = classify(CompositeToy(), Mode(1, 1), small_domain)
    assert kinds(points) == [SingularityKind.VERTEX, SingularityKind.LINE]
    corner, line = points
    assert not line.mu_parity_pure
    assert corner.line_adjacent and corner.location == (0.0, 0.0)
    assert corner.to_dict()["line_adjacent"]
    mixed = classify(CompositeToy(), Mode(1, -1), small_domain)
    assert sorted(p.kind.value for p in mixed) == ["tangent", "vertex"]
    tangent = [p for p in mixed if p.kind is SingularityKind.TANGENT][0]
    assert tangent.location == pytest.approx((1.0, 0.0))
    assert tangent.x0 == pytest.approx(0.5)


def test_vertex_law_and_relative_sign():
    sing = SingularityPoint(SingularityKind.VERTEX, 0.0, location=(0.0, 0.0), mu_parity_pure=True)
    law = predict_damping(sing, NuOrders(0, 0, (2, 2)))
    assert law.power == 2.0
    assert law.relative_sign == 1
    assert law.survives_cos and not law.survives_sin
    odd = predict_damping(sing, NuOrders(1, 0, (2, 2)))
    assert odd.power == 3.0
    assert odd.survives_sin and not odd.survives_cos


def test_oscillating_law_survives_both_parities():
    sing = SingularityPoint(SingularityKind.VERTEX, 1.0, location=(0.0, 0.0))
    law = predict_damping(sing, NuOrders(0, 0))
    assert law.omega0 == 1.0
    assert law.survives_cos and law.survives_sin


def test_pure_vertex_cancels_at_every_order():
    sing = SingularityPoint(SingularityKind.VERTEX, 0.0, location=(0.0, 0.0), mu_parity_pure=True)
    law = predict_damping(sing, NuOrders(0, 0, (2, 2)))
    resolution = resolve_cancellation(law, Observable(Mode(1, 1), Parity.SIN))
    assert resolution.all_orders_cancelled
    assert resolution.label == "C"


def test_curved_line_promotes_to_next_order():
    sing = SingularityPoint(SingularityKind.LINE, 0.0, location=(0.0, 5.0),
                            edge=ActionDomain.toy().physical_edges()[0], mu_parity_pure=False)
    law = predict_damping(sing, NuOrders(0, 0, (2, 2)))
    assert law.power == 1.0
    resolution = resolve_cancellation(law, Observable(Mode(1, 1), Parity.COS))
    assert resolution.effective.power == 2.0
    assert resolution.label == "2(C)"


def test_special_vertex_has_no_law():
    sing = SingularityPoint(SingularityKind.VERTEX, 0.0, location=(0.0, 0.0), special=True)
    with pytest.raises(UnsupportedSingularity):
        predict_damping(sing, NuOrders(0, 0))


def test_infinity_law():
    sing = SingularityPoint(SingularityKind.INFINITY, 0.0, mu_decay=3, nu_decay=4)
    law = predict_damping(sing, NuOrders(0, 0))
    assert law.power == pytest.approx(2.0 / 3.0)
    divergent = SingularityPoint(SingularityKind.INFINITY, 0.0, mu_decay=3, nu_decay=2)
    with pytest.raises(DivergentIntegral):
        predict_damping(divergent, NuOrders(0, 0))


def test_composite_predictions(small_domain):
    model, spec = CompositeToy(), ToyFactorized()
    expected = {"A1": ("2(C)", 0.0), "A2": ("1", 0.0), "A3": ("1.5", 0.5), "A4": ("1.5", 0.5)}
    for label, (text, omega0) in expected.items():
        prediction = predict_observable(model, spec, Observable.toy(label), small_domain)
        assert prediction.label == text
        assert prediction.omega0 == pytest.approx(omega0)


def test_shifted_vertex_oscillates(small_domain):
    prediction = predict_observable(ShiftedVertexToy(), ToyFactorized(), Observable.toy("A2"), small_domain)
    assert prediction.power == 2.0
    assert prediction.omega0 == pytest.approx(1.0)


def test_critical_toy_exchange_symmetry(small_domain):
    spec = ToyFactorized(h1=2, h2=2, j1_star=1.0, j2_star=1.0)
    assert exchange_antisymmetric(CriticalToy(), spec, Mode(1, -1), small_domain)
    assert not exchange_antisymmetric(CriticalToy(), spec, Mode(1, 1), small_domain)
    prediction = predict_observable(CriticalToy(), spec, Observable.toy("A4"), small_domain)
    assert prediction.all_orders_cancelled


def test_isochrone_infinity_exponents():
    model = IsochroneModel()
    exps = infinity_exponents(model, IsochroneCosCos(model=model), Mode(1, 1))
    assert (exps.a, exps.b) == (3, 4)


@pytest.mark.parametrize("mode,expected", [
    ((1, 1), ["infinity", "vertex"]),
    ((2, -1), ["infinity", "line", "tangent", "vertex"]),
    ((3, -2), ["infinity", "tangent", "vertex"]),
])
def test_isochrone_inventories(mode, expected):
    model = IsochroneModel()
    spec = IsochroneCosCos(n2=mode[0], n3=mode[1], model=model)
    points = classify(model, Mode(*mode), ActionDomain.isochrone(256), spec)
    assert sorted(p.kind.value for p in points) == expected


def test_isochrone_prediction_is_two_thirds():
    model = IsochroneModel()
    spec = IsochroneCosCos(model=model)
    prediction = predict_observable(model, spec, Observable(Mode(1, 1), Parity.SIN),
                                    ActionDomain.isochrone(256))
    assert prediction.power == pytest.approx(2.0 / 3.0)
    assert prediction.law.kind is SingularityKind.INFINITY


@pytest.mark.parametrize("mode,omega0", [((2, -1), 0.1185), ((3, -2), 0.0509)])
def test_isochrone_tangent_frequencies(mode, omega0):
    tangent = tangent_point_isochrone(Mode(*mode))
    assert tangent.omega0 == pytest.approx(omega0, abs=5e-4)
    assert tangent.residual < 1e-12
    ratio = mode[1] / mode[0]
    assert float(tangent_equation(tangent.l_star)) == pytest.approx(ratio, abs=1e-12)


def test_isochrone_tangent_errors():
    with pytest.raises(NoTangentPoint):
        tangent_point_isochrone(Mode(1, 1))
    with pytest.raises(NoTangentPoint) as info:
        tangent_point_isochrone(Mode(3, -1))
    assert info.value.special_vertex
    with pytest.raises(NoTangentPoint):
        tangent_point_isochrone(Mode(0, 1))


def test_line_endpoint_vertex_adds_no_law(small_domain):
    model, spec = CompositeToy(), ToyFactorized()
    prediction = predict_observable(model, spec, Observable.toy("A2"), small_domain)
    assert any(p.line_adjacent for p in prediction.singularities)
    assert [r.leading.kind for r in prediction.resolutions] == [SingularityKind.LINE]
    assert prediction.label == "1"


def test_isochrone_line_endpoint_is_flagged():
    model = IsochroneModel()
    spec = IsochroneCosCos(n2=2, n3=-1, model=model)
    points = classify(model, Mode(2, -1), ActionDomain.isochrone(256), spec)
    vertex = [p for p in points if p.kind is SingularityKind.VERTEX]
    assert len(vertex) == 1
    assert vertex[0].line_adjacent and not vertex[0].special
