"""Curvature of the envelope and residuals of the identities the construction obeys.

All derivatives of the envelope are fourth-order central differences of exact
pointwise samples; derivatives of the horosphere congruence are analytic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

from .bianchi_calo import BCData, EnvelopeSample, SphereSample, envelope_at, horosphere_lift
from .errors import BryantError, ComplexPrincipalCurvatures, NonImmersed, StencilDegenerate
from .holomorphic import ComplexJet2
from .minkowski import GRAM41, Q, Vec41, Vec42, inner41

FD_STEP = 1e-4
BRIOSCHI_STEP = 1e-3
IMMERSION_TOL = 1e-8
UMBILIC_CLAMP = 1e-12


class Metric2(NamedTuple):
    E: float
    F: float
    G: float

    @property
    def det(self) -> float:
        return self.E * self.G - self.F * self.F

    def matrix(self) -> np.ndarray:
        return np.array([[self.E, self.F], [self.F, self.G]])


def _form(a_x: Vec41, a_y: Vec41, b_x: Vec41, b_y: Vec41) -> Metric2:
    """Symmetrized (da, db)."""
    return Metric2(
        inner41(a_x, b_x),
        0.5 * (inner41(a_x, b_y) + inner41(a_y, b_x)),
        inner41(a_y, b_y),
    )


# ------------------------------------------------------------- envelope stencil


class EnvelopeDerivatives(NamedTuple):
    f: Vec41
    f_x: Vec41
    f_y: Vec41
    t_x: Vec41
    t_y: Vec41


@dataclass(frozen=True)
class EnvelopeStencil:
    """Fourth-order central stencil at offsets +-step, +-2 step along each axis.

    Neighbours are ``None`` where the pipeline failed.
    """

    center: EnvelopeSample
    xp: EnvelopeSample | None
    xm: EnvelopeSample | None
    yp: EnvelopeSample | None
    ym: EnvelopeSample | None
    step: float
    xp2: EnvelopeSample | None = None
    xm2: EnvelopeSample | None = None
    yp2: EnvelopeSample | None = None
    ym2: EnvelopeSample | None = None

    @property
    def neighbours(self) -> tuple:
        return (self.xp, self.xm, self.yp, self.ym, self.xp2, self.xm2, self.yp2, self.ym2)

    def derivatives(self) -> EnvelopeDerivatives:
        if any(n is None for n in self.neighbours):
            raise StencilDegenerate("stencil neighbour missing")
        k = 1.0 / (12.0 * self.step)

        def d(p2, p1, m1, m2, attr):
            a = [getattr(n, attr) for n in (p2, p1, m1, m2)]
            return ((a[1] - a[2]) * 8.0 - (a[0] - a[3])) * k

        return EnvelopeDerivatives(
            f=self.center.f,
            f_x=d(self.xp2, self.xp, self.xm, self.xm2, "f"),
            f_y=d(self.yp2, self.yp, self.ym, self.ym2, "f"),
            t_x=d(self.xp2, self.xp, self.xm, self.xm2, "t"),
            t_y=d(self.yp2, self.yp, self.ym, self.ym2, "t"),
        )


def envelope_stencil(data: BCData, z: complex, step: float = FD_STEP, center=None) -> EnvelopeStencil:
    """Evaluate the pipeline at z and at its eight axis neighbours."""
    z = complex(z)
    if center is None:
        center = envelope_at(z, data)[1]

    def at(w):
        try:
            return envelope_at(w, data)[1]
        except BryantError:
            return None

    h = step
    return EnvelopeStencil(
        center,
        at(z + h), at(z - h), at(z + 1j * h), at(z - 1j * h),
        step,
        at(z + 2 * h), at(z - 2 * h), at(z + 2j * h), at(z - 2j * h),
    )


def _derivs(stencil) -> EnvelopeDerivatives:
    return stencil if isinstance(stencil, EnvelopeDerivatives) else stencil.derivatives()


def _check_immersed(I: Metric2, f: Vec41) -> None:
    scale = IMMERSION_TOL * f.norm() ** 2
    if not (I.E > 0 and I.G > 0 and I.det > scale * scale):
        raise NonImmersed(f"first fundamental form degenerate: {I}")


def fundamental_forms(stencil) -> tuple[Metric2, Metric2]:
    """I = (df, df) and II = -(dt, df) from an EnvelopeStencil (or its derivatives)."""
    d = _derivs(stencil)
    I = _form(d.f_x, d.f_y, d.f_x, d.f_y)
    II = Metric2(*(-c for c in _form(d.t_x, d.t_y, d.f_x, d.f_y)))
    _check_immersed(I, d.f)
    return I, II


def third_form(stencil) -> Metric2:
    d = _derivs(stencil)
    return _form(d.t_x, d.t_y, d.t_x, d.t_y)


def second_form_asymmetry(stencil) -> float:
    """|(t_x, f_y) - (t_y, f_x)|, zero for a genuine surface."""
    d = _derivs(stencil)
    return abs(inner41(d.t_x, d.f_y) - inner41(d.t_y, d.f_x))


# -------------------------------------------------------------------- curvatures


class Curvatures(NamedTuple):
    H: float
    K: float
    k1: float
    k2: float


def shape_operator(I: Metric2, II: Metric2) -> np.ndarray:
    if I.det <= 0:
        raise NonImmersed(f"first fundamental form not positive definite: {I}")
    return np.linalg.solve(I.matrix(), II.matrix())


def mean_gauss(I: Metric2, II: Metric2) -> Curvatures:
    det = I.det
    if det <= 0:
        raise NonImmersed(f"first fundamental form not positive definite: {I}")
    E, F, G = I
    L, M, N = II
    K = (L * N - M * M) / det
    H = (E * N - 2 * F * M + G * L) / (2 * det)
    S = shape_operator(I, II)
    # H^2 - K written as a sum of differences, stable near umbilics
    disc = 0.25 * (S[0, 0] - S[1, 1]) ** 2 + S[0, 1] * S[1, 0]
    if disc < 0:
        if disc < -UMBILIC_CLAMP:
            raise ComplexPrincipalCurvatures(f"H^2 - K = {disc!r}")
        disc = 0.0
    root = math.sqrt(disc)
    return Curvatures(H, K, H + root, H - root)


def cayley_hamilton_residual(I: Metric2, II: Metric2, III: Metric2, H: float, K: float) -> float:
    """Largest component of (dt,dt) + 2H (dt,df) + K (df,df), relative to the term sizes."""
    I_, II_, III_ = I.matrix(), II.matrix(), III.matrix()
    res = III_ - 2.0 * H * II_ + K * I_  # (dt, df) = -II
    scale = np.linalg.norm(III_) + 2.0 * abs(H) * np.linalg.norm(II_) + abs(K) * np.linalg.norm(I_)
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(res)) / scale)


def cayley_hamilton_fit(I: Metric2, II: Metric2, III: Metric2) -> tuple[float, float]:
    """(H, K) as the least-squares solution of III - 2H II + K I = 0."""
    A = np.array([[-2.0 * II.E, I.E], [-2.0 * II.F, I.F], [-2.0 * II.G, I.G]])
    b = -np.array(III)
    (H, K), *_ = np.linalg.lstsq(A, b, rcond=None)
    return float(H), float(K)


def weingarten_residual(H: float, K: float, mu: float) -> float:
    return (mu + 1.0) * K - 2.0 * mu * H + (mu - 1.0)


def rodrigues_offdiag(I: Metric2, II: Metric2) -> float:
    S = shape_operator(I, II)
    norm = np.linalg.norm(S)
    if norm == 0:
        return 0.0
    return float(math.hypot(S[0, 1], S[1, 0]) / norm)


# ------------------------------------------------------- congruence metric checks


class MetricCheck(NamedTuple):
    metric: Metric2
    target: float  # E* = G* = 4/(1 - mu|z|^2)^2, F* = 0
    mismatch: float


def induced_metric_s(sample: SphereSample) -> MetricCheck:
    m = _form(sample.s_x, sample.s_y, sample.s_x, sample.s_y)
    target = 4.0 / (1.0 - sample.mu * abs(sample.z) ** 2) ** 2
    mismatch = max(abs(m.E - target), abs(m.F), abs(m.G - target)) / target
    return MetricCheck(m, target, mismatch)


def conformal_factor_residual(sample: SphereSample, jet: ComplexJet2 | None = None) -> float:
    """max |(dh, dh) - r^2 (ds, ds)| / |h'|^2 over the E, F, G components."""
    jet = jet if jet is not None else sample.jet
    m = _form(sample.s_x, sample.s_y, sample.s_x, sample.s_y)
    dh2 = abs(jet.f1) ** 2
    r2 = sample.r**2
    return max(abs(dh2 - r2 * m.E), abs(r2 * m.F), abs(dh2 - r2 * m.G)) / dh2


def metric_stencil(data: BCData, z: complex, step: float = BRIOSCHI_STEP) -> list[list[Metric2]]:
    """Analytic (ds, ds) on a 3x3 stencil, indexed [x offset + 1][y offset + 1]."""
    z = complex(z)
    out = []
    for i in (-1, 0, 1):
        row = []
        for j in (-1, 0, 1):
            smp = horosphere_lift(z + step * complex(i, j), data)
            row.append(_form(smp.s_x, smp.s_y, smp.s_x, smp.s_y))
        out.append(row)
    return out


def brioschi_curvature(metrics: Sequence[Sequence[Metric2]], step: float) -> float:
    """Intrinsic Gauss curvature at the stencil centre by the Brioschi formula."""
    if len(metrics) != 3 or any(len(row) != 3 for row in metrics):
        raise StencilDegenerate("Brioschi needs a 3x3 metric stencil")
    arr = np.array([[tuple(m) for m in row] for row in metrics], dtype=float)
    if not np.all(np.isfinite(arr)):
        raise StencilDegenerate("non-finite metric in stencil")
    Es, Fs, Gs = arr[..., 0], arr[..., 1], arr[..., 2]
    h = step
    E, F, G = Es[1, 1], Fs[1, 1], Gs[1, 1]

    def du(a):
        return (a[2, 1] - a[0, 1]) / (2 * h)

    def dv(a):
        return (a[1, 2] - a[1, 0]) / (2 * h)

    E_u, E_v, F_u, F_v, G_u, G_v = du(Es), dv(Es), du(Fs), dv(Fs), du(Gs), dv(Gs)
    E_vv = (Es[1, 2] - 2 * E + Es[1, 0]) / h**2
    G_uu = (Gs[2, 1] - 2 * G + Gs[0, 1]) / h**2
    F_uv = (Fs[2, 2] - Fs[2, 0] - Fs[0, 2] + Fs[0, 0]) / (4 * h**2)
    det = E * G - F * F
    if det <= 0:
        raise StencilDegenerate("metric not positive definite at stencil centre")
    A = np.array(
        [
            [-0.5 * E_vv + F_uv - 0.5 * G_uu, 0.5 * E_u, F_u - 0.5 * E_v],
            [F_v - 0.5 * G_u, E, F],
            [0.5 * G_v, F, G],
        ]
    )
    B = np.array([[0.0, 0.5 * E_v, 0.5 * G_u], [0.5 * E_v, E, F], [0.5 * G_u, F, G]])
    return float((np.linalg.det(A) - np.linalg.det(B)) / det**2)


def brioschi_richardson(data: BCData, z: complex, step: float = BRIOSCHI_STEP) -> float:
    """Second-order Richardson extrapolation of the Brioschi curvature over (step, step/2)."""
    k1 = brioschi_curvature(metric_stencil(data, z, step), step)
    k2 = brioschi_curvature(metric_stencil(data, z, step / 2), step / 2)
    return (4.0 * k2 - k1) / 3.0


# ----------------------------------------------------------------------- wedge

_PAIRS = list(combinations(range(6), 2))


class Lambda2Vec42:
    """Element of the second exterior power of R^{4,2}: components w_ij, i < j,
    in the basis order (p, o, inf, q, e1, e2)."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = np.asarray(components, dtype=float).reshape(15)

    @classmethod
    def wedge(cls, a: Vec42, b: Vec42) -> "Lambda2Vec42":
        x, y = a.array, b.array
        return cls([x[i] * y[j] - x[j] * y[i] for i, j in _PAIRS])

    def __add__(self, other):
        return Lambda2Vec42(self.components + other.components)

    def __sub__(self, other):
        return Lambda2Vec42(self.components - other.components)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.components)))

    def __repr__(self):
        return f"Lambda2Vec42({self.components.tolist()})"


class WedgeResult(NamedTuple):
    wedge: Lambda2Vec42
    norm: float  # sup-norm relative to the sizes of the factors


def sigma_lifts(sample: SphereSample, env: EnvelopeSample, mu: float) -> tuple[Vec42, Vec42]:
    """sigma+ = p + s and sigma- = (1 + mu)/2 sigma+ - f."""
    sp = Vec42(1.0, sample.s)
    sm = sp * (0.5 * (1.0 + mu)) - Vec42(0.0, env.f)
    return sp, sm


def sigma_wedge(sample: SphereSample, stencil, mu: float) -> WedgeResult:
    """sigma+_x ^ sigma-_y - sigma+_y ^ sigma-_x on a central-difference stencil."""
    d = _derivs(stencil)
    k = 0.5 * (1.0 + mu)
    sp_x, sp_y = Vec42(0.0, sample.s_x), Vec42(0.0, sample.s_y)
    sm_x = Vec42(0.0, sample.s_x * k - d.f_x)
    sm_y = Vec42(0.0, sample.s_y * k - d.f_y)
    w = Lambda2Vec42.wedge(sp_x, sm_y) - Lambda2Vec42.wedge(sp_y, sm_x)
    n = np.linalg.norm
    scale = n(sp_x.array) * n(sm_y.array) + n(sp_y.array) * n(sm_x.array)
    return WedgeResult(w, w.sup_norm() / scale if scale > 0 else 0.0)


# ---------------------------------------------------------------------- report


def normalization_defect(sample: SphereSample, env: EnvelopeSample) -> float:
    """Largest violation of the lift normalizations at one node."""
    s, f, t, h = sample.s, env.f, env.t, env.hlift
    vals = [
        inner41(s, s) - 1.0,
        inner41(s, Q) + 1.0,
        inner41(h, h),
        inner41(h, Q),
        inner41(f, f),
        inner41(f, Q) + 1.0,
        inner41(f, s),
        inner41(t, t) - 1.0,
        inner41(t, Q),
        inner41(t, f),
        inner41(h, f) + 1.0,
    ]
    return float(max(abs(v) for v in vals))


def envelope_defect(sample: SphereSample, env: EnvelopeSample) -> float:
    """|(f, s_x)|, |(f, s_y)| relative to the coordinate sizes."""
    f = env.f
    return max(
        abs(inner41(f, sample.s_x)) / (f.norm() * sample.s_x.norm()),
        abs(inner41(f, sample.s_y)) / (f.norm() * sample.s_y.norm()),
    )


REPORT_FIELDS = (
    "H",
    "K_ext",
    "k1",
    "k2",
    "weingarten_residual",
    "cayley_hamilton_residual",
    "metric_mismatch",
    "conformal_mismatch",
    "wedge_norm",
    "brioschi_defect",
    "rodrigues_offdiag",
)


@dataclass(frozen=True)
class CurvatureReport:
    """Per-node curvature data.  ``weingarten_residual`` is normalized by
    1 + |K| + |H|; numeric fields are NaN unless ``status == "ok"``."""

    z: complex
    status: str = "ok"
    r: float = math.nan
    H: float = math.nan
    Kext: float = math.nan
    k1: float = math.nan
    k2: float = math.nan
    weingarten_residual: float = math.nan
    cayley_hamilton_residual: float = math.nan
    metric_mismatch: float = math.nan
    conformal_mismatch: float = math.nan
    wedge_norm: float = math.nan
    brioschi_defect: float = math.nan
    rodrigues_offdiag: float = math.nan
    normalization_defect: float = math.nan
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def row(self) -> dict:
        return {
            "H": self.H,
            "K_ext": self.Kext,
            "k1": self.k1,
            "k2": self.k2,
            "weingarten_residual": self.weingarten_residual,
            "cayley_hamilton_residual": self.cayley_hamilton_residual,
            "metric_mismatch": self.metric_mismatch,
            "conformal_mismatch": self.conformal_mismatch,
            "wedge_norm": self.wedge_norm,
            "brioschi_defect": self.brioschi_defect,
            "rodrigues_offdiag": self.rodrigues_offdiag,
        }


def node_report(
    data: BCData,
    z: complex,
    fd_step: float = FD_STEP,
    brioschi_step: float = BRIOSCHI_STEP,
    sample: SphereSample | None = None,
    env: EnvelopeSample | None = None,
) -> CurvatureReport:
    """Every identity check at one parameter value; failures become a status code."""
    z = complex(z)
    try:
        if sample is None or env is None:
            sample, env = envelope_at(z, data)
        stencil = envelope_stencil(data, z, fd_step, center=env)
        d = stencil.derivatives()
        I, II = fundamental_forms(d)
        III = third_form(d)
        H, K, k1, k2 = mean_gauss(I, II)
        k_int = brioschi_curvature(metric_stencil(data, z, brioschi_step), brioschi_step)
        return CurvatureReport(
            z=z,
            r=sample.r,
            H=H,
            Kext=K,
            k1=k1,
            k2=k2,
            weingarten_residual=abs(weingarten_residual(H, K, data.mu)) / (1.0 + abs(K) + abs(H)),
            cayley_hamilton_residual=cayley_hamilton_residual(I, II, III, H, K),
            metric_mismatch=induced_metric_s(sample).mismatch,
            conformal_mismatch=conformal_factor_residual(sample),
            wedge_norm=sigma_wedge(sample, d, data.mu).norm,
            brioschi_defect=abs(k_int + data.mu),
            rodrigues_offdiag=rodrigues_offdiag(I, II),
            normalization_defect=normalization_defect(sample, env),
        )
    except BryantError as exc:
        return CurvatureReport(z=z, status=exc.code, message=str(exc))
