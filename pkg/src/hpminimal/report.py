"""Run configurations, verification runs and deterministic report output."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any

import numpy as np

from . import checks, gauge, scan, sequence
from .calculus import angles, gauss_curvature, metric_factor
from .families import (
    ClassifiedSurface,
    ExponentialFamily,
    FamilyConstraintError,
    make_classified,
    make_exponential,
)
from .surface import Grid, SurfaceMap, jet_at

__all__ = [
    "ExitCode",
    "ConfigError",
    "RunConfig",
    "RunResult",
    "CSV_COLUMNS",
    "emit_report",
    "grid_table",
    "run",
]

CSV_COLUMNS = ("x", "y", "metric_factor", "cos_sq_alpha", "gauss_curvature")
COMMANDS = ("verify", "angle", "sequence", "gauge", "scan")


class ExitCode(IntEnum):
    PASS = 0
    CHECK_FAILURE = 1
    CONFIG_ERROR = 2
    INTERNAL_ERROR = 3


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    """Everything a run needs; mirrors the command-line flags.

    The surface is either a classified torus (``variant``, ``n``,
    ``lift_variant``) or an exponential family (``thetas`` and ``weights``).
    """

    command: str = "verify"
    variant: str = "clifford"
    lift_variant: str | None = None
    n: int = 2
    m: int | None = None
    thetas: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None
    resolution: tuple[int, int] = (9, 9)
    cell: tuple[float, float, float, float] | None = None
    tol: float | None = None
    depth: int | None = None
    trials: int = 20
    seed: int = 0
    out: str | None = None
    csv: str | None = None
    timings: bool = False

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if min(self.resolution) < 3:
            raise ConfigError("grid resolution must be at least 3 per axis")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tolerance must be positive")
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if (self.thetas is None) != (self.weights is None):
            raise ConfigError("--theta and --weights must be given together")
        if self.cell is not None:
            x0, x1, y0, y1 = self.cell
            if not (x1 > x0 and y1 > y0):
                raise ConfigError("cell bounds must satisfy a < b and c < d")
        if self.depth is not None and self.depth < 1:
            raise ConfigError("depth must be at least 1")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        return self

    def echo(self) -> dict:
        d = asdict(self)
        for key in ("out", "csv", "timings"):
            d.pop(key)
        return d


@dataclass
class RunResult:
    config: RunConfig
    checks: list[checks.CheckResult] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)
    table: list[tuple] | None = None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        out = {
            "command": self.config.command,
            "config": self.config.echo(),
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
            "data": self.data,
        }
        if self.config.timings:
            out["timings"] = self.timings
        return out


# -- serialization ---------------------------------------------------------------
def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _json(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _json([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return _quote(obj)
    if isinstance(obj, np.ndarray):
        return _json(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_quote(str(k))}: {_json(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _json(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _quote(s: str) -> str:
    return json.dumps(s)


def emit_report(result: RunResult | dict, format: str = "json") -> bytes:
    """Deterministic bytes for a result.

    JSON keys are sorted, floats carry 17 significant digits and complex
    numbers become ``[re, im]``.  CSV output is the pointwise grid table with
    the columns in :data:`CSV_COLUMNS`, rows in row-major grid order.
    """
    if format == "json":
        doc = result.to_dict() if isinstance(result, RunResult) else result
        return (_json(doc, 2, 0) + "\n").encode()
    if format == "csv":
        rows = result.table if isinstance(result, RunResult) else result.get("table")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows or []:
            writer.writerow([format_float(v) for v in row])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {format!r}")


def format_float(v) -> str:
    return format(float(v), ".17g")


# -- surfaces from a config ---------------------------------------------------------
def build_surface(cfg: RunConfig) -> tuple[SurfaceMap, SurfaceMap | None]:
    try:
        if cfg.thetas is not None:
            fam = ExponentialFamily(tuple(cfg.thetas), tuple(cfg.weights))
            lift = make_exponential(fam)
            return lift, None
        cls_params = ClassifiedSurface(cfg.n, cfg.variant, cfg.lift_variant)
    except (FamilyConstraintError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return make_classified(cls_params)


def _grid(cfg: RunConfig, surface: SurfaceMap) -> Grid:
    x0, x1, y0, y1 = cfg.cell if cfg.cell is not None else surface.cell
    return Grid(x0, x1, y0, y1, cfg.resolution[0], cfg.resolution[1])


def grid_table(surface: SurfaceMap, grid: Grid) -> list[tuple]:
    """Rows ``(x, y, metric factor, cos^2 alpha, K)`` in row-major order."""
    pts = grid.points
    jet = jet_at(surface, pts, 1)
    mf = np.asarray(metric_factor(jet, strict=False))
    valid = mf >= 1e-12
    cos2 = np.full(len(pts), np.nan)
    K = np.full(len(pts), np.nan)
    if valid.any():
        sub = jet_at(surface, pts[valid], 1)
        cos2[valid] = angles(sub).cos_sq_alpha
        K[valid] = gauss_curvature(surface, pts[valid])
    return [(p.real, p.imag, f, c, k) for p, f, c, k in zip(pts, mf, cos2, K)]


# -- commands -------------------------------------------------------------------------
def _verify(cfg, res: RunResult):
    surface, lift = build_surface(cfg)
    grid = _grid(cfg, surface)
    if lift is None:
        res.checks += [checks.check_totally_real(surface, "cp", grid, cfg.tol),
                       checks.check_minimal_cp(surface, grid, cfg.tol)]
        fam = ExponentialFamily(tuple(cfg.thetas), tuple(cfg.weights))
        res.data["moment"] = fam.moment
    else:
        rep = checks.verify_surface(surface, lift, grid, cfg.tol)
        res.checks += list(rep.checks[k] for k in sorted(rep.checks))
    res.data["surface"] = surface.name
    if cfg.csv:
        res.table = grid_table(surface, grid)


def _angle(cfg, res: RunResult):
    surface, _ = build_surface(cfg)
    if surface.target != "hp":
        raise ConfigError("angle needs a classified surface (--variant, --n)")
    grid = _grid(cfg, surface)
    res.table = grid_table(surface, grid)
    cos2 = np.array([r[3] for r in res.table])
    res.data["max_cos_sq_alpha"] = float(np.nanmax(cos2))
    res.checks.append(checks.check_totally_real(surface, "hp", grid, cfg.tol))


def _sequence(cfg, res: RunResult):
    surface, lift = build_surface(cfg)
    lift = lift or surface
    grid = _grid(cfg, surface)
    n = lift.ambient_n
    depth = cfg.depth or 2 * n + 3
    iso = sequence.isotropy_order(lift, grid, depth)
    res.data["isotropy_order"] = {"value": iso.value, "at_least": iso.at_least,
                                  "terminated_at": iso.terminated_at}
    res.data["cyclicity_residual"] = sequence.cyclicity_residual(lift, grid)
    res.checks.append(sequence.check_bundle_relations(lift, grid, min(depth, n + 1),
                                                      tol=cfg.tol or 1e-8))


def _gauge(cfg, res: RunResult):
    surface, lift = build_surface(cfg)
    lift = lift or surface
    grid = _grid(cfg, surface)
    rng = np.random.default_rng(cfg.seed)
    gauged = gauge.apply_gauge(lift, gauge.random_gauge(rng))
    res.data["integrability_residual"] = gauge.integrability_residual(gauged, grid)
    try:
        horizontal = gauge.horizontalize(gauged, grid=grid)
    except (gauge.NonIntegrableError, gauge.HolonomyError) as exc:
        res.data["horizontalize_error"] = str(exc)
        res.checks.append(checks.CheckResult("horizontalize", math.inf, gauge.INTEGRABILITY_TOL,
                                             None, lift.provider.kind))
        return
    res.checks.append(checks.check_horizontal(horizontal, grid, cfg.tol or 1e-6))


def _scan(cfg, res: RunResult):
    m = cfg.m if cfg.m is not None else cfg.n
    try:
        rep = scan.constraint_scan(cfg.n, m, cfg.trials, cfg.tol or 1e-8,
                                   thetas=cfg.thetas, seed=cfg.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    res.data["scan"] = rep.to_dict()
    ok = 0.0 if rep.feasible else math.inf
    res.checks.append(checks.CheckResult("scan_feasible", ok, 0.0, None, "exact"))


_COMMANDS = {"verify": _verify, "angle": _angle, "sequence": _sequence,
             "gauge": _gauge, "scan": _scan}


def run(cfg: RunConfig) -> tuple[ExitCode, RunResult | None]:
    """Execute a validated configuration and write the requested files.

    Returns the exit code and the result (``None`` on configuration errors).
    """
    cfg.validate()
    res = RunResult(cfg)
    start = time.perf_counter()
    _COMMANDS[cfg.command](cfg, res)
    res.timings["total_seconds"] = time.perf_counter() - start
    if cfg.out:
        Path(cfg.out).write_bytes(emit_report(res, "json"))
    if cfg.csv:
        if res.table is None:
            raise ConfigError(f"{cfg.command} produces no grid table for --csv")
        Path(cfg.csv).write_bytes(emit_report(res, "csv"))
    return (ExitCode.PASS if res.passed else ExitCode.CHECK_FAILURE), res
