"""Grid sampling, mesh assembly and file output (OBJ, PLY, CSV).

Degenerate nodes are flagged and skipped, never interpolated: faces touching
a flagged node are dropped.  Floats are written with 17 significant digits so
files round-trip exactly and are byte-identical between runs.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .bianchi_calo import BCData, EnvelopeSample, SphereSample, envelope_at, radius
from .curvature import BRIOSCHI_STEP, FD_STEP, CurvatureReport, node_report
from .errors import BryantError, EmptyGrid
from .grid import GridSpec
from .holomorphic import eval_jet2
from .minkowski import Point3

THREADS_ENV = "BRYANTSURF_THREADS"

CSV_COLUMNS = (
    "z_re",
    "z_im",
    "r",
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
    "status",
)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn: Callable, items: Sequence, workers: int | None) -> list:
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def fmt(x: float) -> str:
    return "%.17g" % x


# ---------------------------------------------------------------------- sampling


@dataclass(frozen=True)
class NodeSample:
    z: complex
    status: str = "ok"
    sphere: SphereSample | None = None
    envelope: EnvelopeSample | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def sample_node(data: BCData, z: complex, exclusions: Iterable[Callable[[complex], bool]] = ()) -> NodeSample:
    z = complex(z)
    if any(pred(z) for pred in exclusions):
        return NodeSample(z, "Excluded")
    try:
        sphere, env = envelope_at(z, data)
    except BryantError as exc:
        return NodeSample(z, exc.code, message=str(exc))
    return NodeSample(z, sphere=sphere, envelope=env)


@dataclass(frozen=True)
class GridField:
    grid: GridSpec
    nodes: list[list[NodeSample]]  # [ix][iy]

    def flat(self) -> list[NodeSample]:
        return [n for row in self.nodes for n in row]

    @property
    def valid_count(self) -> int:
        return sum(n.ok for n in self.flat())


def radius_exclusion(data: BCData, tol: float) -> Callable[[complex], bool]:
    """Exclude nodes with |r| <= tol, a band around the zero-radius locus."""

    def pred(z: complex) -> bool:
        try:
            jet = eval_jet2(data.h, z)
        except BryantError:
            return True
        return abs(data.r_scale * radius(z, data.mu, jet.f1)) <= tol

    return pred


def critical_exclusion(data: BCData, tol: float) -> Callable[[complex], bool]:
    """Exclude nodes with |h'| <= tol or where h cannot be evaluated."""

    def pred(z: complex) -> bool:
        try:
            return abs(eval_jet2(data.h, z).f1) <= tol
        except BryantError:
            return True

    return pred


def _resolve_grid(data: BCData, grid: GridSpec | None) -> GridSpec:
    grid = grid if grid is not None else data.domain
    if grid is None:
        raise ValueError("no grid given and the data carries no domain")
    return grid


def sample_grid(data: BCData, grid: GridSpec | None = None, workers: int | None = None) -> GridField:
    """Run the construction at every node; failures are recorded per node."""
    grid = _resolve_grid(data, grid)
    zs = grid.nodes()
    flat = [complex(z) for z in zs.ravel()]
    samples = _map(lambda z: sample_node(data, z, grid.exclusions), flat, workers)
    ny = zs.shape[1]
    nodes = [samples[i * ny : (i + 1) * ny] for i in range(zs.shape[0])]
    out = GridField(grid, nodes)
    if out.valid_count == 0:
        raise EmptyGrid(f"no valid node among {len(flat)}")
    return out


def evaluate_reports(
    data: BCData,
    field_: GridField,
    fd_step: float = FD_STEP,
    brioschi_step: float = BRIOSCHI_STEP,
    workers: int | None = None,
) -> list[list[CurvatureReport]]:
    def one(n: NodeSample) -> CurvatureReport:
        if not n.ok:
            return CurvatureReport(z=n.z, status=n.status, message=n.message)
        return node_report(data, n.z, fd_step, brioschi_step, sample=n.sphere, env=n.envelope)

    flat = _map(one, field_.flat(), workers)
    ny = field_.grid.nodes().shape[1]
    return [flat[i * ny : (i + 1) * ny] for i in range(len(field_.nodes))]


# -------------------------------------------------------------------------- mesh


@dataclass
class SurfaceMesh:
    """Vertices in grid order (None where flagged), faces as index tuples into
    that list, and the per-vertex status and report."""

    vertices: list[Point3 | None]
    faces: list[tuple[int, ...]]
    flags: list[str]
    reports: list[CurvatureReport | None] = field(default_factory=list)

    def compact(self) -> tuple[list[Point3], list[tuple[int, ...]]]:
        """Valid vertices only, faces re-indexed (0-based)."""
        remap, verts = {}, []
        for i, v in enumerate(self.vertices):
            if v is not None:
                remap[i] = len(verts)
                verts.append(v)
        return verts, [tuple(remap[i] for i in f) for f in self.faces]


def grid_faces(nx: int, ny: int, valid: Sequence[bool], wrap: bool = False, triangulate: bool = False):
    faces = []
    ncols = ny if wrap else ny - 1
    for i in range(nx - 1):
        for j in range(ncols):
            jn = (j + 1) % ny
            quad = (i * ny + j, (i + 1) * ny + j, (i + 1) * ny + jn, i * ny + jn)
            if not all(valid[k] for k in quad):
                continue
            if triangulate:
                faces.append((quad[0], quad[1], quad[2]))
                faces.append((quad[0], quad[2], quad[3]))
            else:
                faces.append(quad)
    return faces


def build_mesh(field_: GridField, reports=None, triangulate: bool = False) -> SurfaceMesh:
    flat = field_.flat()
    nx, ny = len(field_.nodes), len(field_.nodes[0])
    verts = [n.envelope.position if n.ok else None for n in flat]
    flat_reports = [r for row in reports for r in row] if reports is not None else [None] * len(flat)
    flags = [n.status for n in flat]
    if reports is not None:
        # curvature failures do not remove geometry, but they are reported
        flags = [n.status if not n.ok else r.status for n, r in zip(flat, flat_reports)]
    faces = grid_faces(nx, ny, [v is not None for v in verts], field_.grid.wraps, triangulate)
    return SurfaceMesh(verts, faces, flags, flat_reports)


def _write(path, text: str) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(text)


def export_obj(mesh: SurfaceMesh, path) -> None:
    """Text OBJ: ``v x y z`` with (x, y) the C-part and z the height; 1-based faces."""
    verts, faces = mesh.compact()
    lines = ["# bryantsurf envelope mesh"]
    lines += [f"v {fmt(p.u)} {fmt(p.v)} {fmt(p.height)}" for p in verts]
    lines += ["f " + " ".join(str(i + 1) for i in f) for f in faces]
    _write(path, "\n".join(lines) + "\n")


def export_ply(mesh: SurfaceMesh, path) -> None:
    verts, faces = mesh.compact()
    head = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(verts)}",
        "property double x",
        "property double y",
        "property double z",
        f"element face {len(faces)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    body = [f"{fmt(p.u)} {fmt(p.v)} {fmt(p.height)}" for p in verts]
    body += [" ".join([str(len(f))] + [str(i) for i in f]) for f in faces]
    _write(path, "\n".join(head + body) + "\n")


def export_mesh(mesh: SurfaceMesh, path) -> None:
    if str(path).lower().endswith(".ply"):
        export_ply(mesh, path)
    else:
        export_obj(mesh, path)


def read_obj(path) -> tuple[list[tuple[float, float, float]], list[tuple[int, ...]]]:
    verts, faces = [], []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append(tuple(float(x) for x in parts[1:4]))
            elif parts[0] == "f":
                faces.append(tuple(int(x.split("/")[0]) for x in parts[1:]))
    return verts, faces


def export_report_csv(reports: Iterable[CurvatureReport], path) -> None:
    """One RFC-4180 row per node; numeric cells are empty for flagged nodes."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(CSV_COLUMNS)
        for rep in reports:
            row = [fmt(rep.z.real), fmt(rep.z.imag)]
            if rep.ok:
                vals = [rep.r] + list(rep.row().values())
                row += ["" if math.isnan(v) else fmt(v) for v in vals]
            else:
                row += [""] * (len(CSV_COLUMNS) - 3)
            row.append(rep.status)
            w.writerow(row)


# ----------------------------------------------------------------------- profile


@dataclass(frozen=True)
class ProfilePoint:
    t: float
    z: complex
    position: Point3 | None
    status: str


def profile_curve(data: BCData, theta: float, t_min: float, t_max: float, n: int) -> list[ProfilePoint]:
    """Envelope positions along the ray z = t e^{i theta}."""
    if n < 1:
        raise ValueError("n must be positive")
    ts = [t_min] if n == 1 else [t_min + (t_max - t_min) * k / (n - 1) for k in range(n)]
    out = []
    for t in ts:
        z = t * complex(math.cos(theta), math.sin(theta))
        node = sample_node(data, z)
        out.append(ProfilePoint(t, z, node.envelope.position if node.ok else None, node.status))
    return out
