"""Command line front end.

Exit codes: 0 all checks pass, 1 checks ran and failed, 2 could not run.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from .bianchi_calo import BCData, horosphere_lift, mobius_reparam, parallel_family
from .config import RunConfig, load_config
from .errors import BryantError, ConfigError, EmptyGrid
from .holomorphic import parse_holomorphic
from .mesh import build_mesh, evaluate_reports, export_mesh, export_report_csv, sample_grid
from .verify import Tolerances, summarize, verify

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
TOLERANCE_NAMES = ("weingarten", "metric", "conformal", "wedge", "brioschi")
RADIUS_LAW_TOL = 1e-12


class Run:
    """A loaded config plus command-line overrides."""

    def __init__(self, args):
        self.path = Path(args.config)
        self.cfg: RunConfig = load_config(self.path)
        self.out_dir = Path(args.out) if args.out else None
        self.workers = args.threads
        tol = self.cfg.tolerances.spec()
        for name in TOLERANCE_NAMES:
            value = getattr(args, f"tolerance.{name}")
            if value is not None:
                if not value >= 0:
                    raise ConfigError(f"--tolerance.{name} must be non-negative")
                tol = replace(tol, **{name: value})
        self.tol: Tolerances = tol
        self.fd_step = args.fd_step if args.fd_step is not None else self.cfg.fd_step
        self.r_scale = args.r_scale if args.r_scale is not None else self.cfg.r_scale
        if self.fd_step <= 0 or self.r_scale <= 0:
            raise ConfigError("--fd-step and --r-scale must be positive")

    def data(self, h=None, mu=None, grid=None) -> BCData:
        cfg = self.cfg
        grid = (grid or cfg.grid).spec()
        data = BCData(parse_holomorphic(h or cfg.h), float(cfg.mu if mu is None else mu), grid, self.r_scale)
        if cfg.reparam is not None:
            p = cfg.reparam
            data = mobius_reparam(data, p.a, p.b, p.c, p.d)
        return data

    def output(self, kind: str, suffix: str, tag: str = "") -> Path | None:
        configured = getattr(self.cfg.outputs, kind)
        if configured is None and self.out_dir is None and kind == "report":
            return None
        name = Path(configured).name if configured else f"{self.path.stem}{suffix}"
        if tag:
            p = Path(name)
            name = f"{p.stem}_{tag}{p.suffix}"
        if self.out_dir is not None:
            return self.out_dir / name
        target = Path(configured).parent / name if configured else Path(name)
        return target if target.is_absolute() else self.path.parent / target


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)


def _write_json(path: Path | None, obj) -> None:
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_dump(obj) + "\n", encoding="utf-8")


def _generate_one(run: Run, data: BCData, tag: str = ""):
    field_ = sample_grid(data, workers=run.workers)
    reports = evaluate_reports(data, field_, run.fd_step, run.cfg.brioschi_step, run.workers)
    mesh = build_mesh(field_, reports)
    export_mesh(mesh, run.output("mesh", ".obj", tag))
    export_report_csv([r for row in reports for r in row], run.output("csv", ".csv", tag))
    return summarize(data, [r for row in reports for r in row], run.tol)


def run_generate(run: Run) -> int:
    run.cfg.require("h", "mu")
    summary = _generate_one(run, run.data())
    _write_json(run.output("report", ".json"), summary.to_dict())
    print(f"generated {summary.valid}/{summary.nodes} valid nodes", file=sys.stderr)
    return EXIT_OK


def run_verify(run: Run) -> int:
    run.cfg.require("h", "mu")
    data = run.data()
    summary, _, reports = verify(data, tol=run.tol, fd_step=run.fd_step,
                                 brioschi_step=run.cfg.brioschi_step, workers=run.workers)
    if run.cfg.outputs.csv or run.out_dir:
        export_report_csv([r for row in reports for r in row], run.output("csv", ".csv"))
    _write_json(run.output("report", ".json"), summary.to_dict())
    print(_dump(summary.to_dict()))
    return EXIT_OK if summary.passed else EXIT_FAIL


def radius_law_defect(data: BCData, member: BCData, rho: float) -> float:
    """max |r~(e^rho z) - e^-rho r(z)| / |e^-rho r(z)| over the base grid."""
    worst = 0.0
    k = math.exp(rho)
    for z in data.domain.nodes().ravel():
        try:
            r = horosphere_lift(complex(z), data).r
            r_new = horosphere_lift(complex(z) * k, member).r
        except BryantError:
            continue
        worst = max(worst, abs(r_new - r / k) / abs(r / k))
    return worst


def run_family(run: Run) -> int:
    run.cfg.require("h", "mu", "family")
    base = run.data()
    members, ok = [], True
    for i, rho in enumerate(run.cfg.family.rho):
        member = parallel_family(base, rho)
        summary = _generate_one(run, member, tag=f"member{i}")
        defect = radius_law_defect(base, member, rho)
        passed = summary.passed and defect <= RADIUS_LAW_TOL
        ok &= passed
        members.append({"rho": rho, "mu": member.mu, "radius_law_defect": defect,
                        "passed": passed, "summary": summary.to_dict()})
    result = {"members": members, "passed": ok}
    _write_json(run.output("report", ".json"), result)
    print(_dump(result))
    return EXIT_OK if ok else EXIT_FAIL


def run_sweep(run: Run) -> int:
    if not run.cfg.sweep:
        raise ConfigError("field 'sweep': needs at least one (h, mu) entry")
    rows, ok = [], True
    for item in run.cfg.sweep:
        data = run.data(item.h, item.mu, item.grid)
        try:
            summary = verify(data, tol=run.tol, fd_step=run.fd_step,
                             brioschi_step=run.cfg.brioschi_step, workers=run.workers)[0]
            d = summary.to_dict()
        except EmptyGrid as exc:
            d = {"h": item.h, "mu": item.mu, "passed": False, "error": str(exc)}
        ok &= d["passed"]
        rows.append(d)
    for d in rows:
        failed = [k for k, v in d.get("identities", {}).items() if not v["passed"]]
        print(f"{d['h']:>20}  mu={d['mu']:<8g} {'PASS' if d['passed'] else 'FAIL'}  {' '.join(failed)}",
              file=sys.stderr)
    result = {"runs": rows, "passed": ok}
    _write_json(run.output("report", ".json"), result)
    print(_dump(result))
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"generate": run_generate, "verify": run_verify, "family": run_family, "sweep": run_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bryantsurf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="TOML run configuration")
        p.add_argument("--out", help="directory for all output files")
        p.add_argument("--fd-step", type=float, help="finite-difference step for envelope derivatives")
        p.add_argument("--r-scale", type=float, help="debug: multiply the radius function")
        p.add_argument("--threads", type=int, help="worker threads (default: $BRYANTSURF_THREADS or 1)")
        for tol in TOLERANCE_NAMES:
            p.add_argument(f"--tolerance.{tol}", type=float, metavar="X", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = Run(args)
        return COMMANDS[args.command](run)
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
    except EmptyGrid as exc:
        print(f"EmptyGrid: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"IoError: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
