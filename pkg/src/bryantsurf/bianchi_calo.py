"""Bryant type surfaces as second envelopes of explicit horosphere congruences.

From a holomorphic map h and a parameter mu the horosphere with Euclidean
radius r = (1 - mu |z|^2) |h'| / 2 touching the ideal plane at h(z) is lifted
to R^{4,1}.  Its second envelope f (the first one being the ideal point h) is
read off from the normal plane of the congruence, no integration needed.

Half-space coordinates: ``centre`` and ``position`` are Point3 values whose
``height`` points along -q, so r > 0 puts the surface in the upper half space.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from . import holomorphic as holo
from .errors import (
    AmbiguousNullSplit,
    DegenerateNormalPlane,
    DegeneratePlane,
    DegenerateSphere,
    IdealEnvelopePoint,
    NotImmersed,
    SingularMobius,
)
from .grid import GridSpec
from .holomorphic import ComplexJet2, HoloExpr
from .minkowski import (
    GRAM41,
    Q,
    Point3,
    Vec41,
    inner41,
    null_directions_in_plane,
    project_null_point,
)

R_EPS = 1e-6
RANK_TOL = 1e-8
SPLIT_TOL = 1e-9
IDEAL_EPS = 1e-12


@dataclass(frozen=True)
class BCData:
    """Input of the construction.  ``r_scale`` multiplies the radius function;
    anything but 1 breaks the construction on purpose (falsification runs)."""

    h: HoloExpr
    mu: float
    domain: GridSpec | None = None
    r_scale: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu!r}")

    @classmethod
    def from_text(cls, h: str, mu: float, domain: GridSpec | None = None, r_scale: float = 1.0) -> "BCData":
        return cls(holo.parse_holomorphic(h), float(mu), domain, r_scale)


@dataclass(frozen=True)
class SphereSample:
    z: complex
    r: float
    centre: Point3
    s: Vec41
    s_x: Vec41
    s_y: Vec41
    jet: ComplexJet2
    mu: float


@dataclass(frozen=True)
class EnvelopeSample:
    z: complex
    f: Vec41
    position: Point3
    t: Vec41
    hlift: Vec41
    split_angle: float  # angle between the discarded null line and s + q


def to_halfspace(p: Point3) -> Point3:
    """Flip between q-coordinates and half-space (height along -q) coordinates."""
    return Point3(-p.height, p.u, p.v)


def radius(z: complex, mu: float, h1: complex) -> float:
    return (1.0 - mu * abs(z) ** 2) * abs(h1) / 2.0


def centre(z: complex, data: BCData) -> Point3:
    jet = holo.eval_jet2(data.h, z)
    r = data.r_scale * radius(z, data.mu, jet.f1)
    return Point3(r, jet.f0.real, jet.f0.imag)


def _radius_gradient(z: complex, mu: float, jet: ComplexJet2, scale: float) -> tuple[float, float]:
    a = 1.0 - mu * abs(z) ** 2
    m = abs(jet.f1)
    log_d = jet.f2 / jet.f1  # d/dz log h'
    m_x = m * log_d.real
    m_y = -m * log_d.imag
    r_x = scale * (-2.0 * mu * z.real * m + a * m_x) / 2.0
    r_y = scale * (-2.0 * mu * z.imag * m + a * m_y) / 2.0
    return r_x, r_y


def _sphere_coords(hv: complex, r: float) -> np.ndarray:
    return np.array([1.0 / r, abs(hv) ** 2 / (2.0 * r), -1.0, hv.real / r, hv.imag / r])


def horosphere_lift(z: complex, data: BCData, r_eps: float = R_EPS) -> SphereSample:
    """Horosphere s = (1/r)(o + h - r q + |h|^2/2 inf) with analytic x/y partials."""
    z = complex(z)
    jet = holo.eval_jet2(data.h, z)
    r = data.r_scale * radius(z, data.mu, jet.f1)
    if abs(r) <= r_eps * (abs(jet.f1) + 1.0):
        raise DegenerateSphere(f"radius {r!r} at z = {z!r}")
    r_x, r_y = _radius_gradient(z, data.mu, jet, data.r_scale)
    hv, h1 = jet.f0, jet.f1
    inv = 1.0 / r
    half_sq = abs(hv) ** 2 / 2.0

    def partial(dh: complex, dr: float) -> np.ndarray:
        dinv = -dr * inv * inv
        dhalf = (hv.conjugate() * dh).real
        return np.array(
            [dinv, dhalf * inv + half_sq * dinv, 0.0, dh.real * inv + hv.real * dinv, dh.imag * inv + hv.imag * dinv]
        )

    return SphereSample(
        z=z,
        r=r,
        centre=Point3(r, hv.real, hv.imag),
        s=Vec41.from_array(_sphere_coords(hv, r)),
        s_x=Vec41.from_array(partial(h1, r_x)),
        s_y=Vec41.from_array(partial(1j * h1, r_y)),
        jet=jet,
        mu=data.mu,
    )


def sphere_partials_fd(z: complex, data: BCData, step: float = 1e-5) -> tuple[Vec41, Vec41]:
    """Central-difference partials of s, for cross-checking the analytic ones."""
    z = complex(z)

    def s_at(w):
        return horosphere_lift(w, data).s

    s_x = (s_at(z + step) - s_at(z - step)) / (2 * step)
    s_y = (s_at(z + 1j * step) - s_at(z - 1j * step)) / (2 * step)
    return s_x, s_y


def _angle_to(v: np.ndarray, ref: np.ndarray) -> float:
    a = v / np.linalg.norm(v)
    b = ref / np.linalg.norm(ref)
    return float(np.linalg.norm(a - np.dot(a, b) * b))


def second_envelope(sample: SphereSample) -> EnvelopeSample:
    rows = np.array([sample.s.array, sample.s_x.array, sample.s_y.array])
    sv = np.linalg.svd(rows, compute_uv=False)
    if sv[-1] < RANK_TOL * sv[0]:
        raise NotImmersed(f"s, s_x, s_y have rank < 3 at z = {sample.z!r}")
    # vectors Minkowski-orthogonal to the rows span the normal plane
    _, _, vt = np.linalg.svd(rows @ GRAM41)
    n1, n2 = Vec41.from_array(vt[3]), Vec41.from_array(vt[4])
    try:
        d1, d2 = null_directions_in_plane(n1, n2)
    except DegeneratePlane as exc:
        raise DegenerateNormalPlane(str(exc)) from exc

    hlift = sample.s + Q
    h_arr = hlift.array
    a1, a2 = _angle_to(d1.array, h_arr), _angle_to(d2.array, h_arr)
    if a1 <= SPLIT_TOL and a2 <= SPLIT_TOL:
        raise AmbiguousNullSplit(f"both null normals align with s + q at z = {sample.z!r}")
    f0, split_angle = (d2, a1) if a1 <= a2 else (d1, a2)
    fq = inner41(f0, Q)
    if abs(fq) < IDEAL_EPS:
        raise IdealEnvelopePoint(f"envelope reaches the ideal boundary at z = {sample.z!r}")
    f = f0 * (-1.0 / fq)
    return EnvelopeSample(
        z=sample.z,
        f=f,
        position=to_halfspace(project_null_point(f)),
        t=sample.s - f,
        hlift=hlift,
        split_angle=split_angle,
    )


def envelope_at(z: complex, data: BCData) -> tuple[SphereSample, EnvelopeSample]:
    sample = horosphere_lift(z, data)
    return sample, second_envelope(sample)


def parallel_family(data: BCData, rho: float) -> BCData:
    """Member of the parallel family: mu e^{-2 rho}, h precomposed with w -> e^{-rho} w."""
    if rho == 0:
        return data
    k = math.exp(-rho)
    h = holo.substitute(data.h, holo.Mul(holo.Const(complex(k)), holo.Z))
    domain = data.domain.scaled(math.exp(rho)) if data.domain is not None else None
    return replace(data, h=h, mu=data.mu * math.exp(-2.0 * rho), domain=domain)


def mobius_reparam(data: BCData, a: complex, b: complex, c: complex, d: complex, eps: float = 1e-12) -> BCData:
    """h precomposed with w -> (a w + b)/(c w + d); mu unchanged."""
    a, b, c, d = (complex(x) for x in (a, b, c, d))
    if abs(a * d - b * c) < eps:
        raise SingularMobius(f"ad - bc = {a * d - b * c!r}")
    if (a, b, c, d) == (1, 0, 0, 1):
        return data
    return replace(data, h=holo.substitute(data.h, holo.Mobius(a, b, c, d, holo.Z)))


def isometric_reparam_check(data: BCData, reparam: HoloExpr, points=None) -> float:
    """max |r~(w)/r(z(w)) - 1| over ``points`` (default: the nodes of ``data.domain``).

    ``reparam`` is the map w -> z; the caller asserts it is an isometry of
    4|dz|^2/(1 - mu|z|^2)^2.
    """
    if points is None:
        if data.domain is None:
            raise ValueError("no sample points and no domain")
        points = data.domain.nodes().ravel()
    new = replace(data, h=holo.substitute(data.h, reparam))
    worst = 0.0
    for w in points:
        w = complex(w)
        zw = holo.evaluate(reparam, w)
        r_new = horosphere_lift(w, new).r
        r_old = horosphere_lift(zw, data).r
        worst = max(worst, abs(r_new / r_old - 1.0))
    return worst


def rotation(theta: float) -> HoloExpr:
    """w -> e^{i theta} w, an isometry for every mu."""
    return holo.Mul(holo.Const(cmath.exp(1j * theta)), holo.Z)


def spherical_rotation(alpha: float) -> HoloExpr:
    """w -> (w cos a + sin a)/(-w sin a + cos a), an isometry of 4|dz|^2/(1+|z|^2)^2."""
    ca, sa = math.cos(alpha), math.sin(alpha)
    return holo.Mobius(complex(ca), complex(sa), complex(-sa), complex(ca), holo.Z)
