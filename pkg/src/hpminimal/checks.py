"""Pointwise residual checks over sample grids.

Every check evaluates a residual at each grid point and reports its maximum.
Points where the induced metric degenerates are skipped and listed in
``excluded``; the tolerance defaults to the provider's (``1e-10`` for exact
jets, ``1e-6`` for finite differences).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import gauss_curvature, horizontal_series
from .linalg import j_map
from .surface import DEGENERACY, FiniteDifference, Grid, SurfaceMap, jet_at

__all__ = [
    "CheckResult",
    "PropertyReport",
    "check_totally_real",
    "check_minimal_cp",
    "check_minimal_hp",
    "check_horizontal",
    "cartan_residual",
    "check_flat_isometric",
    "verify_surface",
]


def _inner(v, w):
    return np.sum(v * np.conj(w), axis=-1)


def _sq(v):
    return np.sum(np.abs(v) ** 2, axis=-1)


def _norm(v):
    return np.sqrt(_sq(v))


def _xy(z) -> tuple[float, float] | None:
    return None if z is None else (float(np.real(z)), float(np.imag(z)))


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one residual check over a grid."""

    name: str
    max_residual: float
    tolerance: float
    worst_point: tuple[float, float] | None
    provider: str = "exact"
    excluded: tuple[tuple[float, float], ...] = ()
    target_value: float | None = None

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tolerance)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "worst_point": list(self.worst_point) if self.worst_point else None,
            "provider": self.provider,
            "excluded": [list(p) for p in self.excluded],
        }
        if self.target_value is not None:
            out["target_value"] = self.target_value
        return out


@dataclass
class PropertyReport:
    """A set of named check results on one grid."""

    grid: Grid
    checks: dict[str, CheckResult] = field(default_factory=dict)

    def add(self, *results: CheckResult) -> "PropertyReport":
        for r in results:
            self.checks[r.name] = r
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def __getitem__(self, name: str) -> CheckResult:
        return self.checks[name]

    def to_dict(self) -> dict:
        g = self.grid
        return {
            "grid": {"cell": [g.x0, g.x1, g.y0, g.y1], "resolution": [g.nx, g.ny]},
            "passed": self.passed,
            "checks": [self.checks[k].to_dict() for k in sorted(self.checks)],
        }


def _summarize(name, surface, pts, residual, valid, tol, target_value=None) -> CheckResult:
    tol = surface.provider.tolerance if tol is None else float(tol)
    residual = np.asarray(residual, dtype=float)
    excluded = tuple(_xy(p) for p in pts[~valid])
    if valid.any():
        masked = np.where(valid, residual, -np.inf)
        i = int(np.argmax(masked))
        worst, value = _xy(pts[i]), float(residual[i])
    else:
        worst, value = None, float("inf")
    return CheckResult(name, value, tol, worst, surface.provider.kind, excluded, target_value)


def _prepare(surface: SurfaceMap, grid: Grid | None, order: int):
    grid = grid or surface.grid()
    pts = grid.points
    return grid, pts, jet_at(surface, pts, order)


def _hp_parts(jet):
    s = jet.value
    js = j_map(s)
    out = []
    for d in (jet.deriv(1, 0), jet.deriv(0, 1)):
        out.append(d - _inner(d, s)[..., None] * s - _inner(d, js)[..., None] * js)
    return out


def _cp_parts(jet):
    s = jet.value
    return [d - _inner(d, s)[..., None] * s for d in (jet.deriv(1, 0), jet.deriv(0, 1))]


def _valid(hz, hzb):
    return _sq(hz) + _sq(hzb) >= DEGENERACY


def check_totally_real(surface: SurfaceMap, target: str | None = None,
                       grid: Grid | None = None, tol: float | None = None) -> CheckResult:
    """Totally real residual in HP^n (``target='hp'``) or in CP^{2n+1}.

    In HP^n the residual is the larger of ``| |hz|^2 - |hzb|^2 |`` and
    ``|<hz, j hzb>|`` for the horizontal differential ``(hz, hzb)``; in the
    complex projective space it is the gap between the projected ``d_z`` and
    ``d_zb`` norms.
    """
    target = target or surface.target
    grid, pts, jet = _prepare(surface, grid, 1)
    if target == "hp":
        hz, hzb = _hp_parts(jet)
        res = np.maximum(np.abs(_sq(hz) - _sq(hzb)), np.abs(_inner(hz, j_map(hzb))))
    elif target == "cp":
        hz, hzb = _cp_parts(jet)
        res = np.abs(_sq(hz) - _sq(hzb))
    else:
        raise ValueError(f"unknown target {target!r}")
    return _summarize(f"totally_real_{target}", surface, pts, res, _valid(hz, hzb), tol)


def minimal_cp_vector(jet) -> np.ndarray:
    """Residual vector of the minimality equation for ``[s]`` in CP^{2n+1}."""
    s, sz, szb, szzb = jet.value, jet.deriv(1, 0), jet.deriv(0, 1), jet.deriv(1, 1)
    c = _inner(sz, s)[..., None]
    return (szzb - _inner(szzb, s)[..., None] * s - c * szb
            - _inner(szb, s)[..., None] * sz - 2 * np.abs(c) ** 2 * s)


def check_minimal_cp(lift: SurfaceMap, grid: Grid | None = None,
                     tol: float | None = None) -> CheckResult:
    grid, pts, jet = _prepare(lift, grid, 2)
    res = _norm(minimal_cp_vector(jet))
    return _summarize("minimal_cp", lift, pts, res, _valid(*_cp_parts(jet)), tol)


def minimal_hp_vector(jet) -> np.ndarray:
    """Residual vector of the minimality equation for the surface in HP^n."""
    hz_series, _ = horizontal_series(jet.series)
    dhz = hz_series.deriv(0, 1)
    s = jet.value
    js = j_map(s)
    szb = jet.deriv(0, 1)
    hz, hzb = _hp_parts(jet)
    jhzb = j_map(hzb)
    return (dhz - _inner(szb, s)[..., None] * hz - _inner(szb, js)[..., None] * jhzb
            + _sq(hz)[..., None] * s + _inner(hz, jhzb)[..., None] * js)


def check_minimal_hp(surface: SurfaceMap, grid: Grid | None = None,
                     tol: float | None = None) -> CheckResult:
    grid, pts, jet = _prepare(surface, grid, 2)
    res = _norm(minimal_hp_vector(jet))
    return _summarize("minimal_hp", surface, pts, res, _valid(*_hp_parts(jet)), tol)


def check_horizontal(lift: SurfaceMap, grid: Grid | None = None,
                     tol: float | None = None) -> CheckResult:
    """Largest of ``|<ds, s>|`` and ``|<ds, js>|`` over both Wirtinger directions."""
    grid, pts, jet = _prepare(lift, grid, 1)
    s = jet.value
    js = j_map(s)
    parts = [np.abs(_inner(jet.deriv(*pq), t)) for pq in ((1, 0), (0, 1)) for t in (s, js)]
    res = np.max(parts, axis=0)
    return _summarize("horizontal", lift, pts, res, np.ones(len(pts), bool), tol)


def _cartan_forms(lift: SurfaceMap, pts):
    jet = jet_at(lift, pts, 1)
    s, sz, szb = jet.value, jet.deriv(1, 0), jet.deriv(0, 1)

    def outer(u, v):
        return u[..., :, None] * np.conj(v[..., None, :])

    f = outer(s, s)
    g = 2 * f - np.eye(s.shape[-1])
    fz = outer(sz, s) + outer(s, szb)
    fzb = outer(szb, s) + outer(s, sz)
    return g @ fz, g @ fzb, _valid(*_cp_parts(jet))


def cartan_residual(lift: SurfaceMap, grid: Grid | None = None, step: float = 1e-3) -> float:
    """Max-entry norm of ``d_zb A_z - [A_z, A_zb]`` over the grid.

    ``A_z = (2 f - I) d_z f`` for the projector ``f = s s*``; the outer
    ``d_zb`` is taken by central differences at steps ``h`` and ``2h`` with
    Richardson extrapolation, so the result is limited by that stencil.
    """
    grid = grid or lift.grid()
    pts = grid.points
    Az, Azb, valid = _cartan_forms(lift, pts)

    def dzb(h):
        fwd = _cartan_forms(lift, pts[:, None] + h * np.array([1, -1, 1j, -1j]), )[0]
        return ((fwd[:, 0] - fwd[:, 1]) + 1j * (fwd[:, 2] - fwd[:, 3])) / (4 * h)

    dA = (4 * dzb(step) - dzb(2 * step)) / 3
    res = np.max(np.abs(dA - (Az @ Azb - Azb @ Az)), axis=(-2, -1))
    return float(np.max(res[valid])) if valid.any() else float("inf")


def check_flat_isometric(surface: SurfaceMap, grid: Grid | None = None,
                         tol: float | None = None, target_factor: float = 2.0,
                         curvature_tol: float | None = None) -> tuple[CheckResult, CheckResult]:
    """Flatness (``|K|``) and isometry (``|e^{2u} - target|``) entries.

    The metric is read in HP^n or CP^{2n+1} according to ``surface.target``.
    """
    grid, pts, jet = _prepare(surface, grid, 1)
    hz, hzb = _hp_parts(jet) if surface.target == "hp" else _cp_parts(jet)
    factor = _sq(hz) + _sq(hzb)
    valid = factor >= DEGENERACY
    if curvature_tol is None:
        curvature_tol = 1e-4 if isinstance(surface.provider, FiniteDifference) else 1e-6
    K = np.full(len(pts), np.nan)
    if valid.any():
        K[valid] = gauss_curvature(surface, pts[valid], metric=surface.target)
    flat = _summarize("flat", surface, pts, np.abs(K), valid, curvature_tol)
    iso = _summarize("isometric", surface, pts, np.abs(factor - target_factor), valid, tol,
                     target_value=target_factor)
    return flat, iso


def verify_surface(surface: SurfaceMap, lift: SurfaceMap | None = None,
                   grid: Grid | None = None, tol: float | None = None,
                   target_factor: float = 2.0) -> PropertyReport:
    """All HP-level checks on ``surface``, plus lift-level checks when given."""
    grid = grid or surface.grid()
    report = PropertyReport(grid)
    report.add(check_totally_real(surface, "hp", grid, tol),
               check_minimal_hp(surface, grid, tol),
               *check_flat_isometric(surface, grid, tol, target_factor))
    if lift is not None:
        report.add(check_horizontal(lift, grid, tol),
                   check_totally_real(lift, "cp", grid, tol),
                   check_minimal_cp(lift, grid, tol))
    return report
