import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bryantsurf.errors import DegeneratePlane, NotNull, PointAtInfinity, ZeroRadius
from bryantsurf.minkowski import (
    E1,
    INF,
    O,
    P,
    Q,
    Point3,
    Vec41,
    Vec42,
    euclidean_lift,
    inner41,
    inner42,
    null_directions_in_plane,
    project_null_point,
    sphere_lift,
)

coord = st.floats(-5, 5, allow_nan=False)
points = st.builds(Point3, coord, coord, coord)


def test_basis_products():
    assert inner41(O, INF) == -1
    assert inner41(Q, Q) == 1
    assert inner41(O, O) == 0 and inner41(INF, INF) == 0
    assert inner41(euclidean_lift(Point3(0, 0, 0)), euclidean_lift(Point3(1, 0, 0))) == -0.5


def test_inner42():
    assert inner42(P, P) == -1
    assert inner42(P, Vec42(0.0, Q)) == 0
    assert inner42(Vec42(1.0, O), Vec42(1.0, INF)) == -2


def test_euclidean_lift_examples():
    assert euclidean_lift(Point3(0, 0, 0)).allclose(O)
    assert euclidean_lift(Point3(1, 0, 0)).allclose(O + Q + INF * 0.5)


def test_sphere_lift_examples():
    s = sphere_lift(Point3(0, 0, 0), 1.0)
    assert s.allclose(O - INF * 0.5)
    assert inner41(s, euclidean_lift(Point3(1, 0, 0))) == pytest.approx(0, abs=1e-15)
    s2 = sphere_lift(Point3(0, 0, 0), 2.0)
    assert inner41(s2, euclidean_lift(Point3(1, 0, 0))) == pytest.approx(0.75)
    assert sphere_lift(Point3(0, 0, 0), -1.0).allclose(-(O - INF * 0.5))
    with pytest.raises(ZeroRadius):
        sphere_lift(Point3(0, 0, 0), 0.0)


def test_project_null_point_examples():
    assert project_null_point(O * 2.0) == Point3(0, 0, 0)
    p = project_null_point(euclidean_lift(Point3(3, 1, 2)) * 7.0)
    assert np.allclose(p, (3, 1, 2), rtol=0, atol=1e-14)
    with pytest.raises(PointAtInfinity):
        project_null_point(INF)
    with pytest.raises(NotNull):
        project_null_point(O + Q)


def test_null_directions_examples():
    d1, d2 = null_directions_in_plane(Q, O + INF)
    expected = {tuple(np.round(v.array / np.linalg.norm(v.array), 12)) for v in
                (Q * math.sqrt(2) + O + INF, Q * math.sqrt(2) - O - INF)}
    got = set()
    for d in (d1, d2):
        a = d.array if d.cq > 0 else -d.array
        got.add(tuple(np.round(a, 12)))
    assert got == expected
    a, b = null_directions_in_plane(O, INF)
    found = sorted(tuple(np.round(np.abs(v.array), 12)) for v in (a, b))
    assert found == sorted([tuple(O.array), tuple(INF.array)])
    with pytest.raises(DegeneratePlane):
        null_directions_in_plane(Q, E1)


@given(points, points)
def test_lift_product_is_distance(y1, y2):
    d2 = sum((a - b) ** 2 for a, b in zip(y1, y2))
    assert inner41(euclidean_lift(y1), euclidean_lift(y2)) == pytest.approx(-d2 / 2, abs=1e-9 * (1 + d2))


@given(points)
def test_lift_is_null_and_projects_back(y):
    v = euclidean_lift(y)
    assert abs(inner41(v, v)) <= 1e-12 * (1 + v.norm() ** 2)
    assert np.allclose(project_null_point(v), y, rtol=0, atol=1e-12)


@given(points, st.floats(0.1, 3), st.floats(0, 2 * math.pi), st.floats(0, math.pi))
def test_incidence_on_sphere(c, r, phi, theta):
    # a point at distance |r| from the centre is incident, one at 2|r| is not
    direction = np.array([math.cos(theta), math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi)])
    for sign in (1, -1):
        s = sphere_lift(c, sign * r)
        on = Point3(*(np.array(c) + r * direction))
        off = Point3(*(np.array(c) + 2 * r * direction))
        assert abs(inner41(s, euclidean_lift(on))) <= 1e-9 * (1 + np.dot(c, c))
        assert abs(inner41(s, euclidean_lift(off))) > 1e-3


@settings(max_examples=50)
@given(st.lists(st.floats(-3, 3).map(lambda x: round(x, 3)), min_size=10, max_size=10))
def test_null_directions_are_null_and_span(vals):
    u1, u2 = Vec41.from_array(vals[:5]), Vec41.from_array(vals[5:])
    try:
        d1, d2 = null_directions_in_plane(u1, u2)
    except DegeneratePlane:
        return
    for d in (d1, d2):
        assert abs(inner41(d, d)) <= 1e-12 * d.norm() ** 2 * max(1.0, np.linalg.cond(np.array([u1.array, u2.array]).T))
        # d lies in span{u1, u2}
        basis = np.array([u1.array, u2.array]).T
        coef, *_ = np.linalg.lstsq(basis, d.array, rcond=None)
        assert np.allclose(basis @ coef, d.array, atol=1e-9)
