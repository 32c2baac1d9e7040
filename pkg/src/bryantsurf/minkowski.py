"""Minkowski spaces R^{4,1} and R^{4,2} in the fixed basis (o, inf, q, e1, e2[, p]).

Here ``o`` and ``inf`` are null with (o, inf) = -1, ``q`` is a unit spacelike
vector standing for the height axis of R^3 = <q> + C, and e1, e2 span the
plane identified with C.  R^{4,2} adds a timelike ``p`` with (p, p) = -1.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DegeneratePlane, NotNull, PointAtInfinity, ZeroRadius

#: Relative tolerance for accepting a vector as null, |(v,v)| <= NULL_TOL * |v|^2.
NULL_TOL = 1e-9
RADIUS_EPS = 1e-14
INFINITY_EPS = 1e-14
PLANE_EPS = 1e-12

# Gram matrix of R^{4,1} in coordinates (co, cinf, cq, cx, cy).
GRAM41 = np.array(
    [
        [0.0, -1.0, 0.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0],
    ]
)


class Point3(NamedTuple):
    """Point of R^3 = <q> + C; ``height`` is the q-coordinate."""

    height: float
    u: float
    v: float

    @property
    def planar(self) -> complex:
        return complex(self.u, self.v)


class Vec41:
    """Vector of R^{4,1} with coefficients of o, inf, q, e1, e2."""

    __slots__ = ("_c",)

    def __init__(self, co=0.0, cinf=0.0, cq=0.0, cx=0.0, cy=0.0):
        c = np.array([co, cinf, cq, cx, cy], dtype=float)
        if not np.all(np.isfinite(c)):
            raise ValueError(f"non-finite Vec41 component: {c}")
        self._c = c

    @classmethod
    def from_array(cls, arr) -> "Vec41":
        v = cls.__new__(cls)
        c = np.array(arr, dtype=float).reshape(5)
        if not np.all(np.isfinite(c)):
            raise ValueError(f"non-finite Vec41 component: {c}")
        v._c = c
        return v

    @property
    def array(self) -> np.ndarray:
        return self._c.copy()

    co = property(lambda self: float(self._c[0]))
    cinf = property(lambda self: float(self._c[1]))
    cq = property(lambda self: float(self._c[2]))
    cx = property(lambda self: float(self._c[3]))
    cy = property(lambda self: float(self._c[4]))

    def norm(self) -> float:
        """Euclidean norm of the coordinate vector (not the Minkowski norm)."""
        return float(np.linalg.norm(self._c))

    def __add__(self, other):
        return Vec41.from_array(self._c + other._c)

    def __sub__(self, other):
        return Vec41.from_array(self._c - other._c)

    def __neg__(self):
        return Vec41.from_array(-self._c)

    def __mul__(self, k):
        return Vec41.from_array(self._c * float(k))

    __rmul__ = __mul__

    def __truediv__(self, k):
        return Vec41.from_array(self._c / float(k))

    def allclose(self, other, atol=1e-12) -> bool:
        return bool(np.allclose(self._c, other._c, rtol=0.0, atol=atol))

    def __repr__(self):
        co, cinf, cq, cx, cy = self._c
        return f"Vec41(co={co!r}, cinf={cinf!r}, cq={cq!r}, cx={cx!r}, cy={cy!r})"


class Vec42:
    """Vector of R^{4,2} = <p> + R^{4,1}."""

    __slots__ = ("cp", "rest")

    def __init__(self, cp=0.0, rest: Vec41 | None = None):
        self.cp = float(cp)
        if not np.isfinite(self.cp):
            raise ValueError("non-finite p coefficient")
        self.rest = rest if rest is not None else Vec41()

    @property
    def array(self) -> np.ndarray:
        """Coordinates in the order (p, o, inf, q, e1, e2)."""
        return np.concatenate(([self.cp], self.rest.array))

    def __add__(self, other):
        return Vec42(self.cp + other.cp, self.rest + other.rest)

    def __sub__(self, other):
        return Vec42(self.cp - other.cp, self.rest - other.rest)

    def __mul__(self, k):
        return Vec42(self.cp * float(k), self.rest * k)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Vec42(cp={self.cp!r}, rest={self.rest!r})"


O = Vec41(co=1.0)
INF = Vec41(cinf=1.0)
Q = Vec41(cq=1.0)
E1 = Vec41(cx=1.0)
E2 = Vec41(cy=1.0)
P = Vec42(cp=1.0)


def inner41(a: Vec41, b: Vec41) -> float:
    x, y = a._c, b._c
    return float(-(x[0] * y[1] + x[1] * y[0]) + x[2] * y[2] + x[3] * y[3] + x[4] * y[4])


def inner42(a: Vec42, b: Vec42) -> float:
    return -a.cp * b.cp + inner41(a.rest, b.rest)


def euclidean_lift(y: Point3) -> Vec41:
    """Parabolic light-cone lift o + y + |y|^2/2 inf."""
    h, u, v = y
    return Vec41(1.0, 0.5 * (h * h + u * u + v * v), h, u, v)


def sphere_lift(centre: Point3, r: float, eps: float = RADIUS_EPS) -> Vec41:
    """Unit lift (1/r)(o + c + (|c|^2 - r^2)/2 inf) of the sphere with centre c, radius r.

    Negative radii give the oppositely oriented sphere.
    """
    if abs(r) < eps:
        raise ZeroRadius(f"sphere radius {r!r} below {eps}")
    h, u, v = centre
    c2 = h * h + u * u + v * v
    return Vec41(1.0, 0.5 * (c2 - r * r), h, u, v) / r


def project_null_point(v: Vec41, tol: float = NULL_TOL, eps: float = INFINITY_EPS) -> Point3:
    """Euclidean point y whose lift is proportional to the null vector ``v``."""
    n2 = float(v._c @ v._c)
    if abs(inner41(v, v)) > tol * n2:
        raise NotNull(f"(v,v) = {inner41(v, v)!r} for |v|^2 = {n2!r}")
    w = -inner41(v, INF)  # equals v.co
    if abs(w) < eps * max(1.0, np.sqrt(n2)):
        raise PointAtInfinity("null vector represents the point at infinity")
    return Point3(v.cq / w, v.cx / w, v.cy / w)


def null_directions_in_plane(u1: Vec41, u2: Vec41, eps: float = PLANE_EPS) -> tuple[Vec41, Vec41]:
    """The two null lines of a Lorentzian 2-plane span{u1, u2}.

    Returned as coordinate-unit vectors.  The Gram matrix is diagonalized so the
    solution stays well conditioned when one of u1, u2 is itself nearly null.
    """
    g11, g12, g22 = inner41(u1, u1), inner41(u1, u2), inner41(u2, u2)
    det = g11 * g22 - g12 * g12
    if det >= -eps * (u1.norm() ** 2) * (u2.norm() ** 2):
        raise DegeneratePlane(f"Gram determinant {det!r} is not negative")
    w, vecs = np.linalg.eigh(np.array([[g11, g12], [g12, g22]]))
    neg = vecs[:, 0] / np.sqrt(-w[0])
    pos = vecs[:, 1] / np.sqrt(w[1])
    out = []
    for a, b in (pos + neg, pos - neg):
        x = a * u1._c + b * u2._c
        out.append(Vec41.from_array(x / np.linalg.norm(x)))
    return out[0], out[1]
