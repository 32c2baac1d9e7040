"""Grid-wide verification: reduce per-node reports to one verdict per identity."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field

from .bianchi_calo import BCData
from .curvature import BRIOSCHI_STEP, FD_STEP, CurvatureReport
from .grid import GridSpec
from .holomorphic import pretty
from .mesh import GridField, evaluate_reports, sample_grid


@dataclass(frozen=True)
class Tolerances:
    weingarten: float = 1e-5
    metric: float = 1e-8
    conformal: float = 1e-9
    wedge: float = 1e-6
    brioschi: float = 1e-3


# identity name -> report attribute
CHECKED = {
    "weingarten": "weingarten_residual",
    "metric": "metric_mismatch",
    "conformal": "conformal_mismatch",
    "wedge": "wedge_norm",
    "brioschi": "brioschi_defect",
}


def specialization(mu: float):
    """The curvature relation the Bryant condition reduces to at mu = -1, 0, 1."""
    if mu == -1:
        return "abs(H - 1)", lambda r: abs(r.H - 1.0)
    if mu == 0:
        return "abs(K_ext - 1)", lambda r: abs(r.Kext - 1.0)
    if mu == 1:
        return "abs(K_ext - H)", lambda r: abs(r.Kext - r.H)
    return None


@dataclass
class IdentityResult:
    max: float | None
    argmax: list[float] | None
    tolerance: float | None = None
    passed: bool | None = None


def _reduce(reports: list[CurvatureReport], fn) -> IdentityResult:
    best, where = None, None
    # deterministic: first maximum in grid order
    for r in reports:
        v = fn(r)
        if math.isnan(v):
            continue
        if best is None or v > best:
            best, where = float(v), [float(r.z.real), float(r.z.imag)]
    return IdentityResult(best, where)


@dataclass
class VerifySummary:
    h: str
    mu: float
    r_scale: float
    nodes: int
    valid: int
    statuses: dict[str, int]
    identities: dict[str, IdentityResult]
    diagnostics: dict[str, IdentityResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.valid > 0 and all(v.passed for v in self.identities.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def summarize(data: BCData, reports: list[CurvatureReport], tol: Tolerances) -> VerifySummary:
    ok = [r for r in reports if r.ok]
    identities = {}
    for name, attr in CHECKED.items():
        res = _reduce(ok, lambda r, a=attr: getattr(r, a))
        res.tolerance = getattr(tol, name)
        res.passed = bool(res.max is not None and res.max <= res.tolerance)
        identities[name] = res
    diagnostics = {
        "cayley_hamilton": _reduce(ok, lambda r: r.cayley_hamilton_residual),
        "rodrigues_offdiag": _reduce(ok, lambda r: r.rodrigues_offdiag),
        "normalization": _reduce(ok, lambda r: r.normalization_defect),
    }
    spec = specialization(data.mu)
    if spec is not None:
        diagnostics[spec[0]] = _reduce(ok, spec[1])
    return VerifySummary(
        h=pretty(data.h),
        mu=float(data.mu),
        r_scale=float(data.r_scale),
        nodes=len(reports),
        valid=len(ok),
        statuses=dict(sorted(Counter(r.status for r in reports).items())),
        identities=identities,
        diagnostics=diagnostics,
    )


def verify(
    data: BCData,
    grid: GridSpec | None = None,
    tol: Tolerances = Tolerances(),
    fd_step: float = FD_STEP,
    brioschi_step: float = BRIOSCHI_STEP,
    workers: int | None = None,
) -> tuple[VerifySummary, GridField, list[list[CurvatureReport]]]:
    field_ = sample_grid(data, grid, workers)
    reports = evaluate_reports(data, field_, fd_step, brioschi_step, workers)
    flat = [r for row in reports for r in row]
    return summarize(data, flat, tol), field_, reports
