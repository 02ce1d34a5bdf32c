"""Horizontal differential, induced metric, angle functions and curvature.

Functions taking a :class:`~hpminimal.surface.Jet` accept batched jets and
return arrays over the batch; a single-point jet gives scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import jets
from .jets import Series
from .linalg import j_map
from .surface import (
    DEGENERACY,
    DegeneratePointError,
    FiniteDifference,
    Jet,
    SurfaceMap,
    as_points,
    jet_at,
)

__all__ = [
    "AngleReport",
    "horizontal_diff",
    "horizontal_series",
    "metric_factor",
    "cp_metric_factor",
    "angles",
    "cp_kahler_angle",
    "gauss_curvature",
]


def _inner(v, w):
    return np.sum(v * np.conj(w), axis=-1)


def _sq(v):
    return np.sum(np.abs(v) ** 2, axis=-1)


def _scalar(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def horizontal_diff(jet: Jet) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal parts of ``d_z s`` and ``d_zb s``.

    ``d^H s = ds - <ds, s> s - <ds, js> js``, i.e. the projection off the
    quaternionic line spanned by ``s``.
    """
    s = jet.value
    js = j_map(s)
    out = []
    for d in (jet.deriv(1, 0), jet.deriv(0, 1)):
        out.append(d - _inner(d, s)[..., None] * s - _inner(d, js)[..., None] * js)
    return out[0], out[1]


def horizontal_series(s: Series) -> tuple[Series, Series]:
    """Expansions of ``d^H s(d_z)`` and ``d^H s(d_zb)``, one order lower than ``s``."""
    js = j_map(s)
    out = []
    for d in (s.dz(), s.dzb()):
        out.append(d - jets.vdot(d, s)[..., None] * s - jets.vdot(d, js)[..., None] * js)
    return out[0], out[1]


def _check_degenerate(factor, strict):
    if strict and np.any(factor < DEGENERACY):
        raise DegeneratePointError(
            f"metric factor {float(np.min(factor)):.3g} below {DEGENERACY:g}",
            value=_scalar(factor),
        )
    return _scalar(factor)


def metric_factor(jet: Jet, strict: bool = True):
    """Conformal factor ``e^{2u} = |d^H s(d_z)|^2 + |d^H s(d_zb)|^2``.

    Raises :class:`DegeneratePointError` when any value is below the
    degeneracy threshold, unless ``strict`` is false.
    """
    hz, hzb = horizontal_diff(jet)
    return _check_degenerate(_sq(hz) + _sq(hzb), strict)


def _cp_parts(jet: Jet):
    s = jet.value
    out = []
    for d in (jet.deriv(1, 0), jet.deriv(0, 1)):
        out.append(d - _inner(d, s)[..., None] * s)
    return out[0], out[1]


def cp_metric_factor(jet: Jet, strict: bool = True):
    """Conformal factor of ``[s]`` in the complex projective space."""
    pz, pzb = _cp_parts(jet)
    return _check_degenerate(_sq(pz) + _sq(pzb), strict)


@dataclass(frozen=True)
class AngleReport:
    """The three local angle cosines and the global ``cos^2`` of the angle."""

    cos_a1: np.ndarray | float
    cos_a2: np.ndarray | float
    cos_a3: np.ndarray | float
    cos_sq_alpha: np.ndarray | float
    point: np.ndarray | complex


def angles(jet: Jet) -> AngleReport:
    """Quaternionic Kähler angle data from the horizontal differential."""
    hz, hzb = horizontal_diff(jet)
    nz, nzb = _sq(hz), _sq(hzb)
    total = nz + nzb
    _check_degenerate(total, True)
    w = _inner(hz, j_map(hzb))
    gap = nz - nzb
    return AngleReport(
        cos_a1=_scalar(gap / total),
        cos_a2=_scalar(-2 * w.imag / total),
        cos_a3=_scalar(2 * w.real / total),
        cos_sq_alpha=_scalar((gap**2 + 4 * np.abs(w) ** 2) / total**2),
        point=_scalar(jet.points),
    )


def cp_kahler_angle(jet: Jet):
    """Kähler angle of ``[s]`` in ``[0, pi]``.

    ``tan(theta / 2)`` is the ratio of the projected ``d_zb`` and ``d_z``
    norms; points where both vanish are degenerate, antiholomorphic points
    return ``pi``.
    """
    pz, pzb = _cp_parts(jet)
    a, b = np.sqrt(_sq(pz)), np.sqrt(_sq(pzb))
    if np.any(a**2 + b**2 < DEGENERACY):
        raise DegeneratePointError("both projected derivatives vanish")
    return _scalar(2 * np.arctan2(b, a))


def _log_factor(surface: SurfaceMap, pts, metric):
    jet = jet_at(surface, pts, 1)
    f = metric_factor(jet, strict=False) if metric == "hp" else cp_metric_factor(jet, strict=False)
    f = np.asarray(f)
    if np.any(f < DEGENERACY):
        raise DegeneratePointError("degenerate metric near the evaluation point",
                                   value=float(np.min(f)))
    return f


def gauss_curvature(surface: SurfaceMap, point, metric: Literal["hp", "cp"] = "hp",
                    step: float | None = None):
    """Gauss curvature ``K = -e^{-2u} (u_xx + u_yy)`` of the induced metric.

    ``u = log(metric factor) / 2`` is differentiated with the five-point
    Laplacian at steps ``h`` and ``2h`` combined by Richardson extrapolation.
    The default step is ``1e-3`` for exact jets and ``1e-2`` for finite
    differences, whose own noise would otherwise be amplified.
    """
    if metric not in ("hp", "cp"):
        raise ValueError("metric must be 'hp' or 'cp'")
    pts = as_points(point)
    if step is None:
        step = 1e-2 if isinstance(surface.provider, FiniteDifference) else 1e-3
    f0 = _log_factor(surface, pts, metric)
    offsets = np.array([1, -1, 1j, -1j])

    def laplacian(h):
        ring = _log_factor(surface, pts[..., None] + h * offsets, metric)
        return 0.5 * (np.log(ring).sum(-1) - 4 * np.log(f0)) / h**2

    lap = (4 * laplacian(step) - laplacian(2 * step)) / 3
    return _scalar(-lap / f0)
