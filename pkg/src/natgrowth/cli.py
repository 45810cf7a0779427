"""Command-line front end: ``natgrowth <mode> [--config F] [--out D] [--seed N] [--tol T]``.

Every run writes ``manifest.json`` in the output directory, also on
failure, listing the produced files with their SHA-256 and the stage that
failed. Exit codes: 0 success, 1 other failure, 2 configuration,
3 hypothesis check, 4 geometry not found, 5 solver failure, 6 certificate.
The thread count of the linear-algebra backend can be capped with the
``NATGROWTH_THREADS`` environment variable.
"""

import argparse
import os
import sys
import time
import traceback
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from . import io
from . import nonlinearity as nl
from .config import MODES, default_config, load_config, validate
from .energy import check_hypotheses, energy_value, principal_direction
from .exceptions import ConfigError, HypothesisFailure, NatGrowthError
from .properties import run_all
from .solvers.general import HChoice, solve_general
from .solvers.mms import SineProduct, mms_convergence
from .solvers.pipeline import solve_model_both, solve_model_min, solve_model_mp

EXIT_OK = 0
EXIT_OTHER = 1
THREADS_ENV = "NATGROWTH_THREADS"


@dataclass
class RunManifest:
    """Record of one run; ``artifacts`` maps a name to ``{"path", "sha256"}``."""

    mode: str
    config: dict = None
    status: str = "running"
    exit_code: int = None
    failed_stage: str = None
    error: str = None
    hypothesis_report: dict = None
    stages: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


class _Recorder:
    def __init__(self, manifest, out):
        self.manifest = manifest
        self.out = Path(out)

    @contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        entry = {"stage": name, "status": "running"}
        self.manifest.stages.append(entry)
        try:
            yield entry
        except BaseException as exc:
            entry["status"] = "failed"
            if isinstance(exc, NatGrowthError) and exc.stage is None:
                exc.stage = name
            raise
        else:
            entry["status"] = "ok"
        finally:
            entry["wall_time"] = time.perf_counter() - t0

    def add(self, name, path):
        self.manifest.artifacts[name] = {"path": str(Path(path).relative_to(self.out))}

    def field(self, name, grid, values):
        self.add(f"{name}.field", io.write_field(self.out / f"{name}.field", grid, values))
        self.add(f"{name}.csv", io.write_field_csv(self.out / f"{name}.csv", grid, values))

    def log(self, name, history):
        self.add(f"{name}_log.csv", io.write_log(self.out / f"{name}_log.csv", history))

    def table(self, name, rows, columns):
        self.add(name, io.write_table(self.out / name, rows, columns))

    def json(self, name, obj):
        self.add(name, io.write_json(self.out / name, obj))


def _cross_section(grid, fields):
    """Values along axis 0 through the middle node of the other axes."""
    mid = tuple([slice(None)] + [k // 2 for k in grid.n[1:]])
    x = grid.coordinates(0)
    cols = {name: np.asarray(v)[mid] for name, v in fields.items()}
    return [dict({"x": float(xi)}, **{k: float(c[i]) for k, c in cols.items()}) for i, xi in enumerate(x)]


def _ray_rows(data, v0):
    """``I(t phi)`` on a geometric ``t`` grid up to twice the ``v0`` scale (sign-normalized data)."""
    work, _ = nl.sign_normalize(data)
    phi = principal_direction(work)
    t_max = 2.0 * float(np.max(np.abs(v0)))
    rows = []
    for t in np.concatenate([[0.0], np.geomspace(1e-3, t_max, 120)]):
        try:
            rows.append({"t": float(t), "energy": energy_value(t * phi, work)})
        except FloatingPointError:
            break
    return rows


def _path_rows(result):
    rows = []
    for sweep, prof in enumerate(result.extra.get("path_profiles", [])):
        rows += [{"sweep": sweep, "node": k, "energy": float(e)} for k, e in enumerate(prof)]
    return rows


def _report(rec, data, cfg):
    with rec.stage("check"):
        report = check_hypotheses(data, seed=cfg.seed)
    rec.manifest.hypothesis_report = report.as_dict()
    rec.json("hypothesis_report.json", report.as_dict())
    return report


def _solution_outputs(rec, data, res, name):
    rec.field(f"v_{name}", data.grid, res.v)
    rec.field(f"u_{name}", data.grid, res.u)
    rec.log(name, res.history)
    rec.manifest.results[name] = res.summary()


def _mms_inputs(cfg, grid):
    if isinstance(cfg.c0, dict) and cfg.c0["type"] == "file":
        raise ConfigError("config.c0: mode mms resamples c0 on refined grids; file input is not allowed")
    specs = cfg.A if isinstance(cfg.A, list) else [cfg.A] * grid.ndim
    a = []
    for s in specs:
        vals = cfg.sample(s, grid, "A")
        if np.ptp(vals) != 0:
            raise ConfigError("config.A: mode mms needs a constant diagonal A")
        a.append(float(vals.flat[0]))
    mu = cfg.sample(cfg.mu, grid, "mu")
    return a, (lambda g: cfg.sample(cfg.c0, g, "c0")), float(mu.flat[0])


def _execute(cfg, rec):
    mode = cfg.mode
    man = rec.manifest
    if mode == "props":
        with rec.stage("props"):
            rows = [{"suite": s, "name": r.name, "passed": r.passed, "detail": r.detail} for s, r in run_all(cfg.seed)]
        rec.table("props.csv", rows, ("suite", "name", "passed", "detail"))
        man.results["props"] = {"passed": sum(r["passed"] for r in rows), "total": len(rows)}
        failed = [r["name"] for r in rows if not r["passed"]]
        if failed:
            raise NatGrowthError("property checks failed: " + "; ".join(failed), "props")
        return
    if mode == "mms":
        grid = cfg.make_grid()
        with rec.stage("setup"):
            a, c0, mu = _mms_inputs(cfg, grid)
        with rec.stage("mms"):
            rows = mms_convergence(
                grid, SineProduct(cfg.mms["amplitude"]), a=a, c0=c0, mu=mu,
                levels=cfg.mms["levels"], scheme=cfg.mms["scheme"],
            )
        table = [{"h": h, "error": e, "order": o} for h, e, o in rows]
        rec.table("mms.csv", table, ("h", "error", "order"))
        man.results["mms"] = {"levels": table, "min_order": min(o for _, _, o in rows[1:])}
        return
    with rec.stage("setup"):
        data = cfg.make_problem()
    if mode == "solve-general":
        choice = HChoice(cfg.general["H"], cfg.general.get("clip"), cfg.general["scheme"])
        with rec.stage("solve_general"):
            res = solve_general(data, choice, tol=cfg.tol, max_iter=cfg.general.get("max_iter", 100), rho=cfg.rho)
        rec.field("u_general", data.grid, res.u)
        rec.field("u_lower", data.grid, res.extra["u_lower"])
        rec.field("u_upper", data.grid, res.extra["u_upper"])
        rec.log("general", res.history)
        man.results["general"] = res.summary()
        return
    report = _report(rec, data, cfg)
    if mode == "check":
        if not report.passed:
            raise HypothesisFailure(
                f"hypotheses fail (h1={report.h1_ok}, h2={report.h2_ok}, coercive={report.coercive_ok})",
                "check",
            )
        return
    opts = dict(rho=cfg.rho, tol=cfg.tol, report=report)
    path_opts = dict(n_path=cfg.n_path, path_tol=cfg.path_tol, max_sweeps=cfg.max_sweeps)
    if mode == "solve-min":
        with rec.stage("solve_min"):
            res = solve_model_min(data, **opts)
        _solution_outputs(rec, data, res, "min")
        return
    if mode == "solve-mp":
        with rec.stage("solve_mp"):
            res = solve_model_mp(data, **opts, **path_opts)
        _solution_outputs(rec, data, res, "mp")
        rec.table("path_profiles.csv", _path_rows(res), ("sweep", "node", "energy"))
        rec.table("ray_scan.csv", _ray_rows(data, res.extra["v0"]), ("t", "energy"))
        return
    with rec.stage("solve_both"):
        r_min, r_mp = solve_model_both(data, **opts, **path_opts)
    _solution_outputs(rec, data, r_min, "min")
    _solution_outputs(rec, data, r_mp, "mp")
    man.results["separation"] = r_min.extra["separation"]
    rec.table("ray_scan.csv", _ray_rows(data, r_mp.extra["v0"]), ("t", "energy"))
    rec.table("path_profiles.csv", _path_rows(r_mp), ("sweep", "node", "energy"))
    sections = _cross_section(
        data.grid, {"u_min": r_min.u, "u_mp": r_mp.u, "v_min": r_min.v, "v_mp": r_mp.v}
    )
    rec.table("cross_sections.csv", sections, ("x", "u_min", "u_mp", "v_min", "v_mp"))


def _finish(manifest, out):
    for entry in manifest.artifacts.values():
        entry["sha256"] = io.sha256(Path(out) / entry["path"])
    io.write_json(Path(out) / "manifest.json", manifest.to_dict())
    return manifest


def run(config, out=None):
    """Execute ``config`` and return its :class:`RunManifest` (never raises for solver failures).

    ``out`` overrides ``config.output``.
    """
    out = Path(out if out is not None else config.output)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(mode=config.mode, config=config.to_dict())
    rec = _Recorder(manifest, out)
    threads = os.environ.get(THREADS_ENV)
    try:
        with threadpool_limits(limits=int(threads) if threads else None):
            _execute(config, rec)
    except NatGrowthError as exc:
        manifest.status = "failed"
        manifest.exit_code = exc.exit_code
        manifest.failed_stage = exc.stage
        manifest.error = str(exc)
    except Exception as exc:  # anything unexpected still leaves a manifest behind
        manifest.status = "failed"
        manifest.exit_code = EXIT_OTHER
        manifest.failed_stage = manifest.stages[-1]["stage"] if manifest.stages else None
        manifest.error = "".join(traceback.format_exception_only(type(exc), exc)).strip()
    else:
        manifest.status = "ok"
        manifest.exit_code = EXIT_OK
    return _finish(manifest, out)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config (default: the two-solution fixture)")
    common.add_argument("--out", help="output directory (default: config 'output')")
    common.add_argument("--seed", type=int, help="seed for randomized diagnostics")
    common.add_argument("--tol", type=float, help="solver tolerance")
    parser = argparse.ArgumentParser(prog="natgrowth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sub.add_parser(mode, parents=[common])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = args.out
    try:
        cfg = load_config(args.config) if args.config else default_config()
        cfg.mode = args.mode
        overrides = {"seed": args.seed, "tol": args.tol}
        for key, val in overrides.items():
            if val is not None:
                setattr(cfg, key, val)
        cfg = validate(cfg.to_dict(), cfg.base_dir)
    except ConfigError as exc:
        out = Path(out or "out")
        out.mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(
            mode=args.mode, status="failed", exit_code=exc.exit_code, failed_stage="config", error=str(exc)
        )
        _finish(manifest, out)
        print(f"natgrowth {args.mode}: configuration error: {exc}", file=sys.stderr)
        return exc.exit_code
    manifest = run(cfg, out)
    where = Path(out if out is not None else cfg.output) / "manifest.json"
    if manifest.exit_code == EXIT_OK:
        print(f"natgrowth {cfg.mode}: ok -> {where}")
    else:
        print(
            f"natgrowth {cfg.mode}: failed at stage {manifest.failed_stage} "
            f"(exit {manifest.exit_code}): {manifest.error}",
            file=sys.stderr,
        )
    return manifest.exit_code


if __name__ == "__main__":
    sys.exit(main())
