"""Gauge frames and the construction of horizontal lifts.

For a unit lift ``s`` put ``F = (s, js)`` (an ``N x 2`` frame of the
quaternionic line) and ``D = F* d_z F``.  Another unit lift of the same
surface is the first column of ``F T`` for ``T`` in SU(2); it is horizontal
exactly when

    d_z T = -D T,    d_zb T = D* T,

which is solvable when ``d_zb D + d_z D* + [D, D*] = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import Callable

import numpy as np

from . import jets
from .jets import Series
from .linalg import j_map
from .surface import (
    ExactJets,
    FiniteDifference,
    Grid,
    SurfaceMap,
    as_points,
    normalize,
    raw_expansion,
)

__all__ = [
    "NonIntegrableError",
    "HolonomyError",
    "frame_series",
    "d_series",
    "compute_D",
    "integrability_residual",
    "GaugeField",
    "GaugeFrame",
    "integrate_gauge",
    "l_path",
    "holonomy",
    "horizontalize",
    "apply_gauge",
    "random_gauge",
    "INTEGRABILITY_TOL",
    "HOLONOMY_TOL",
]

INTEGRABILITY_TOL = 1e-4
HOLONOMY_TOL = 1e-6
SU2_TOL = 1e-8


class NonIntegrableError(ValueError):
    """The gauge equation has no solution (the surface is not totally real)."""


class HolonomyError(RuntimeError):
    """Integrating around a closed loop did not return the starting frame."""


def frame_series(s: Series) -> Series:
    """The ``N x 2`` frame ``(s, js)`` as an expansion."""
    return jets.stack([s, j_map(s)], axis=-1)


def d_series(s: Series) -> Series:
    """Expansion of ``D = (s, js)* d_z (s, js)`` for a unit expansion ``s``."""
    F = frame_series(s)
    dF = F.dz()
    return F.truncate(dF.order).adjoint() @ dF


def compute_D(lift: SurfaceMap, point) -> np.ndarray:
    """Connection matrix ``D`` at one point (2x2) or a batch (..., 2, 2)."""
    s = normalize(raw_expansion(lift, as_points(point), 1))
    return d_series(s).value


def _integrability(s: Series) -> np.ndarray:
    D = d_series(s)
    Dv = D.value
    Dh = np.conj(np.swapaxes(Dv, -1, -2))
    return D.dzb().value + D.adjoint().dz().value + Dv @ Dh - Dh @ Dv


def integrability_residual(lift: SurfaceMap, grid: Grid | None = None) -> float:
    """Max-entry norm of ``d_zb D + d_z D* + [D, D*]`` over the grid."""
    grid = grid or lift.grid()
    s = normalize(raw_expansion(lift, grid.points, 2))
    return float(np.max(np.abs(_integrability(s))))


@dataclass(frozen=True)
class GaugeField:
    """``D`` of a lift, evaluated on demand."""

    lift: SurfaceMap

    def __call__(self, points) -> np.ndarray:
        return compute_D(self.lift, points)


@dataclass(frozen=True)
class GaugeFrame:
    """An SU(2) frame at a point.

    ``max_drift`` is the largest departure from SU(2) (``|T*T - I|`` or
    ``|det T - 1|``) seen before any re-projection while it was integrated.
    """

    T: np.ndarray
    point: np.ndarray | complex = 0j
    max_drift: float = 0.0

    @classmethod
    def identity(cls, point=0j, batch: tuple[int, ...] = ()) -> "GaugeFrame":
        T = np.broadcast_to(np.eye(2, dtype=complex), batch + (2, 2)).copy()
        return cls(T, point)


def _su2_defect(T: np.ndarray) -> float:
    TT = np.conj(np.swapaxes(T, -1, -2)) @ T
    return float(max(np.max(np.abs(TT - np.eye(2))), np.max(np.abs(np.linalg.det(T) - 1))))


def _reproject(T: np.ndarray) -> np.ndarray:
    """Nearest special unitary matrix: polar factor, then divide by sqrt(det)."""
    u, _, vh = np.linalg.svd(T)
    U = u @ vh
    return U / np.sqrt(np.linalg.det(U))[..., None, None]


def integrate_gauge(field: GaugeField | Callable, path, T0: GaugeFrame | np.ndarray,
                    step: float = 1e-3) -> GaugeFrame:
    """Integrate ``dT/dt = -(D z' - D* conj(z')) T`` along a polyline.

    ``path`` holds the vertices, shape ``(L,)`` or ``(L, B)`` for ``B`` paths
    integrated together (complex or ``(x, y)`` pairs).  Each segment is split
    into equal classical Runge-Kutta steps no longer than ``step``; ``T`` is
    projected back to SU(2) after every step.
    """
    verts = as_points(path)
    if verts.ndim == 0 or verts.shape[0] < 1:
        raise ValueError("path needs at least one vertex")
    T = np.asarray(T0.T if isinstance(T0, GaugeFrame) else T0, dtype=complex)
    if _su2_defect(T) > SU2_TOL:
        raise ValueError("initial frame is not in SU(2)")
    T = np.broadcast_to(T, verts.shape[1:] + (2, 2)).copy()
    if step <= 0 or step < 1e-12:
        raise ValueError("integration step underflow")
    drift = 0.0

    for a, b in zip(verts[:-1], verts[1:]):
        length = float(np.max(np.abs(b - a))) if np.size(a) else 0.0
        if length == 0.0:
            continue
        nsteps = max(1, ceil(length / step))
        dz = (b - a) / nsteps
        # D does not depend on T, so every stage point of the segment is
        # evaluated in one batch; the loop below is pure 2x2 algebra.
        ticks = np.arange(2 * nsteps + 1).reshape((-1,) + (1,) * np.ndim(a)) / 2
        D = np.asarray(field(a + ticks * dz))
        Dh = np.conj(np.swapaxes(D, -1, -2))
        w = dz[..., None, None] if np.ndim(dz) else dz
        G = -(D * w - Dh * np.conj(w))
        for i in range(nsteps):
            g0, g1, g2 = G[2 * i], G[2 * i + 1], G[2 * i + 2]
            k1 = g0 @ T
            k2 = g1 @ (T + k1 / 2)
            k3 = g1 @ (T + k2 / 2)
            k4 = g2 @ (T + k3)
            T = T + (k1 + 2 * k2 + 2 * k3 + k4) / 6
            drift = max(drift, _su2_defect(T))
            T = _reproject(T)
    return GaugeFrame(T, verts[-1], drift)


def l_path(base: complex, targets) -> np.ndarray:
    """Axis-aligned paths ``base -> (x, base.y) -> target``, shape ``(3, B)``."""
    t = as_points(targets)
    base = complex(base)
    corner = t.real + 1j * base.imag
    return np.stack([np.full(t.shape, base), corner, t])


def holonomy(field: GaugeField, loop, step: float = 1e-3) -> float:
    """``|T_end - I|`` after integrating around a closed polyline from the identity."""
    verts = as_points(loop)
    frame = integrate_gauge(field, verts, np.eye(2, dtype=complex), step)
    return float(np.max(np.abs(frame.T - np.eye(2))))


def _t_series(D: Series, T0: np.ndarray) -> Series:
    """Expansion of ``T`` solving ``d_z T = -D T``, ``d_zb T = D* T`` from ``T0``."""
    K = D.order + 1
    Dc = D.coef
    Dhc = D.adjoint().coef
    c = np.zeros((K + 1, K + 1) + T0.shape, dtype=complex)
    c[0, 0] = T0

    def product(A, p, q):
        acc = 0
        for i in range(p + 1):
            for j in range(q + 1):
                if i + j <= K - 1:
                    acc = acc + A[i, j] @ c[p - i, q - j]
        return acc

    for d in range(K):
        for p in range(d + 1):
            q = d - p
            c[p + 1, q] = -product(Dc, p, q) / (p + 1)
        c[0, d + 1] = product(Dhc, 0, d) / (d + 1)
    return Series(c, K)


def horizontalize(lift: SurfaceMap, base_point=None, grid: Grid | None = None,
                  step: float | None = None, check: bool = True,
                  provider: ExactJets | FiniteDifference | None = None) -> SurfaceMap:
    """Horizontal lift of the same surface, ``s~ = (s, js) T e_1``.

    ``T`` starts at the identity at ``base_point`` (default: the grid's lower
    left corner) and is carried to each requested point along an L-shaped
    path, first in ``x`` then in ``y``.  Around that point it is expanded
    from the gauge equation itself, so the new lift has exact jets; pass a
    :class:`FiniteDifference` provider to differentiate numerically instead.

    Raises
    ------
    NonIntegrableError
        If the integrability residual exceeds ``1e-4`` on the grid.
    HolonomyError
        If the loop around the grid's boundary fails to close to ``1e-6``.
    """
    grid = grid or lift.grid()
    base = complex(grid.x0, grid.y0) if base_point is None else complex(as_points(base_point))
    if step is None:
        step = 1e-3 * grid.size
    field = GaugeField(lift)
    if check:
        res = integrability_residual(lift, grid)
        if res > INTEGRABILITY_TOL:
            raise NonIntegrableError(f"integrability residual {res:.3g} exceeds {INTEGRABILITY_TOL:g}")
        loop = np.array([complex(grid.x0, grid.y0), complex(grid.x1, grid.y0),
                         complex(grid.x1, grid.y1), complex(grid.x0, grid.y1),
                         complex(grid.x0, grid.y0)])
        h = holonomy(field, loop, step)
        if h > HOLONOMY_TOL:
            raise HolonomyError(f"loop holonomy {h:.3g} exceeds {HOLONOMY_TOL:g}")

    def expand(points, order):
        pts = np.asarray(points, dtype=complex)
        flat = pts.reshape(-1)
        T0 = integrate_gauge(field, l_path(base, flat), np.eye(2, dtype=complex), step).T
        s = normalize(raw_expansion(lift, flat, order + 1))
        D = d_series(s)
        T = _t_series(D, T0)
        F = frame_series(s.truncate(order))
        out = (F @ T.truncate(order))[..., 0]
        return out.reshape_value(pts.shape + (lift.dim,))

    return SurfaceMap(expand, lift.dim, provider or ExactJets(), lift.cell,
                      (lift.name + "-horizontal") if lift.name else "horizontal", lift.target)


# -- gauge transformations of a lift ------------------------------------------
GaugeFn = Callable[[Series, Series], tuple[Series, Series]]


def apply_gauge(lift: SurfaceMap, gauge: GaugeFn) -> SurfaceMap:
    """New lift ``alpha s + beta js`` for a unit quaternion field ``(alpha, beta)``.

    ``gauge(z, zb)`` returns the two expansions; ``|alpha|^2 + |beta|^2``
    should be one, which makes ``[[alpha, -conj(beta)], [beta, conj(alpha)]]``
    an SU(2) gauge.
    """

    def expand(points, order):
        s = normalize(lift.expand(points, order))
        z = jets.variable(points, order)
        alpha, beta = gauge(z, z.conj())
        return s * alpha[..., None] + j_map(s) * beta[..., None]

    return SurfaceMap(expand, lift.dim, lift.provider, lift.cell,
                      (lift.name + "-gauged") if lift.name else "gauged", lift.target)


def random_gauge(rng: np.random.Generator, modes: int = 1, amplitude: float = 1.0) -> GaugeFn:
    """Smooth SU(2) field from random trigonometric polynomials.

    ``alpha = cos(phi) e^{i psi}`` and ``beta = sin(phi) e^{i chi}`` where
    each angle is a sum of ``modes`` random plane waves in ``(x, y)``.
    """
    amps = amplitude * rng.normal(size=(3, modes, 2))
    freqs = rng.integers(-2, 3, size=(3, modes, 2))
    freqs[..., 0] = np.where((freqs == 0).all(-1), 1, freqs[..., 0])

    def gauge(z, zb):
        x = (z + zb) * 0.5
        y = (z - zb) * -0.5j
        angles = []
        for amp, freq in zip(amps, freqs):
            acc = 0
            for (c, d), (fx, fy) in zip(amp, freq):
                arg = x * float(fx) + y * float(fy)
                acc = acc + jets.cos(arg) * c + jets.sin(arg) * d
            angles.append(acc)
        phi, psi, chi = angles
        return jets.cos(phi) * jets.exp(psi * 1j), jets.sin(phi) * jets.exp(chi * 1j)

    return gauge
